//! Eigenvalues of the Laplace–Beltrami operator on a spherical cap
//! `θ ≤ θ₀` under a Dirichlet, Neumann, or Robin condition at the edge.
//!
//! Separating `e^{imφ} P_ν^m(cos θ)` reduces the problem to finding, for
//! each order `m ≥ 0`, the degrees `ν` at which the boundary data of
//! `P_ν^m` at `x₀ = cos θ₀` satisfies the chosen condition; the eigenvalue
//! is `Λ = ν(ν+1)`. Only `m ≥ 0` is kept (the `±m` doubling is removed).
//!
//! The solver scans `ν` on a fixed grid per order, brackets sign changes of
//! a scale-free residual, and polishes each bracket by bisection plus a
//! guarded false-position iteration. The scan floor uses the Rayleigh bound
//! `Λ ≥ m² / max_{θ ≤ θ₀} sin²θ`, which puts every root above
//! `√(m²+¼) − ½ ≥ m − ½`; orders stop once two consecutive scans come back
//! empty (first roots grow with `m`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{integral_eval, legendre_p_with_dx, LegendreArgs, SeriesControl};
use crate::stats::{ks_distance, spacing_histogram_of_levels, BinSpec, SpacingHistogram};

/// Edge condition at `θ = θ₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    /// `∂F/∂n + σF = 0` with `σ ≥ 0`; `Robin(0)` coincides with Neumann.
    Robin(f64),
}

/// A cap eigenvalue search: opening angle, edge condition, degree ceiling.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CapProblem {
    /// Opening angle in radians, strictly inside `(0, π)`.
    pub theta0: f64,
    pub bc: BoundaryCondition,
    /// Keep roots with `ν < nu_max` (strict).
    pub nu_max: f64,
}

impl CapProblem {
    pub fn new(theta0: f64, bc: BoundaryCondition, nu_max: f64) -> Result<Self> {
        if !theta0.is_finite() || theta0 <= 0.0 || theta0 >= std::f64::consts::PI {
            return Err(Error::domain(format!(
                "opening angle must lie strictly inside (0, pi), got {theta0}"
            )));
        }
        if !(nu_max > 0.0) || !nu_max.is_finite() {
            return Err(Error::domain(format!(
                "nu_max must be a finite positive degree ceiling, got {nu_max}"
            )));
        }
        if let BoundaryCondition::Robin(sigma) = bc {
            if !(sigma >= 0.0) || !sigma.is_finite() {
                return Err(Error::domain(format!(
                    "Robin parameter must be finite and >= 0, got {sigma}"
                )));
            }
        }
        Ok(CapProblem { theta0, bc, nu_max })
    }
}

/// One cap eigenvalue. `residual` is the scale-free boundary mismatch at
/// acceptance: the raw condition (see [`cap_residual`]) divided by the local
/// oscillation amplitude of the boundary data and by the condition's
/// sensitivity scale, so a fixed tolerance is meaningful across the entire
/// `(m, ν)` range (the raw values span hundreds of orders of magnitude).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapEigenvalue {
    pub m: u32,
    pub nu: f64,
    pub lambda: f64,
    pub residual: f64,
}

/// Result of a cap spectrum run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CapSpectrum {
    /// Sorted by `(lambda, m)`.
    pub eigenvalues: Vec<CapEigenvalue>,
    /// `counts_per_m[m]` = number of eigenvalues found at order `m`;
    /// trailing empty orders are trimmed.
    pub counts_per_m: Vec<u64>,
    /// Diagnostics from the grid heuristics (empty on healthy runs).
    pub warnings: Vec<String>,
}

impl CapSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// ν-scan grid step. Consecutive roots in ν at fixed `m` are separated by
/// roughly `π/θ₀ ≥ 1`; 0.05 oversamples that spacing twenty-fold.
const SCAN_STEP: f64 = 0.05;
/// Accept the integral backend only when its value clears its own noise
/// floor by this factor.
const NOISE_MARGIN: f64 = 30.0;
/// Half-width below which a refined bracket is accepted.
const NU_TOL: f64 = 1e-12;

/// Boundary data of `P_ν^m` at the cap edge: `u ∝ P(x₀)` and
/// `v ∝ sin θ₀ · dP/dx (x₀) = −dP/dθ (θ₀)`, with one common positive
/// scale factor that depends on the backend (the quadrature backend
/// divides out the envelope). Only scale-free consumers may use this.
struct Edge {
    u: f64,
    v: f64,
}

fn edge(nu: f64, m: u32, theta0: f64) -> Result<Edge> {
    let sin0 = theta0.sin();
    let x0 = theta0.cos();
    // Fast path: contour quadrature, valid away from the equator and from
    // the `m ≈ ν sin θ` noise zone; fall through when its own noise floor
    // says the value is unresolved (e.g. extremely close to a root).
    if x0 >= 0.15 && (m as f64) <= 0.35 * (nu + 0.5) * sin0 {
        let r = integral_eval(nu, m, theta0)?;
        let dnoise = r.noise * (nu + 1.0);
        if r.value.abs() > NOISE_MARGIN * r.noise
            && r.dvalue_dtheta.abs() > NOISE_MARGIN * dnoise
        {
            return Ok(Edge {
                u: r.value,
                v: -r.dvalue_dtheta,
            });
        }
    }
    let args = LegendreArgs::new(nu, m, x0);
    let (p, dp) = legendre_p_with_dx(&args, &SeriesControl::default())?;
    Ok(Edge { u: p, v: sin0 * dp })
}

fn raw_combination(e: &Edge, bc: BoundaryCondition) -> f64 {
    match bc {
        BoundaryCondition::Dirichlet => e.u,
        BoundaryCondition::Neumann => e.v,
        BoundaryCondition::Robin(sigma) => sigma * e.u - e.v,
    }
}

/// Raw boundary-condition combination at the edge:
/// Dirichlet `P_ν^m(x₀)`; Neumann `sin θ₀ · dP/dx`; Robin
/// `σ·P − sin θ₀ · dP/dx` (the outward normal derivative on the sphere is
/// `∂/∂θ = −sin θ₀ · d/dx`, so this is `σF + ∂F/∂n`). Always computed from
/// the unnormalized Ferrers values.
pub fn cap_residual(m: u32, nu: f64, problem: &CapProblem) -> Result<f64> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!(
            "degree must be finite and >= 0, got {nu}"
        )));
    }
    let x0 = problem.theta0.cos();
    let args = LegendreArgs::new(nu, m, x0);
    let (p, dp) = legendre_p_with_dx(&args, &SeriesControl::default())?;
    Ok(raw_combination(
        &Edge {
            u: p,
            v: problem.theta0.sin() * dp,
        },
        problem.bc,
    ))
}

/// Scale-free residual: raw combination over the WKB amplitude of the
/// boundary data times the condition's sensitivity scale.
fn normalized_residual(e: &Edge, bc: BoundaryCondition, nu: f64) -> f64 {
    let band = nu + 0.5;
    let amp = e.u.hypot(e.v / band);
    if amp == 0.0 {
        return 0.0;
    }
    match bc {
        BoundaryCondition::Dirichlet => e.u / amp,
        BoundaryCondition::Neumann => e.v / (band * amp),
        BoundaryCondition::Robin(sigma) => (sigma * e.u - e.v) / ((sigma + band) * amp),
    }
}

fn scan_start(m: u32, problem: &CapProblem) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let mf = m as f64;
    // The Rayleigh bound sees the largest sin θ on the way to the edge.
    let s_eff = if problem.theta0 < std::f64::consts::FRAC_PI_2 {
        problem.theta0.sin()
    } else {
        1.0
    };
    let m_tilde = (mf * mf - 0.25).sqrt();
    (1e-3f64).max(mf - 0.6).max(m_tilde / s_eff - 2.0)
}

fn eval_residual(nu: f64, m: u32, problem: &CapProblem) -> Result<f64> {
    Ok(normalized_residual(
        &edge(nu, m, problem.theta0)?,
        problem.bc,
        nu,
    ))
}

/// Polish a sign-change bracket `[a, b]` to `ν` accuracy ~1e−12: bisection
/// down to 1e−6, then Illinois-damped false position, always keeping a
/// valid bracket.
fn refine(
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
    m: u32,
    problem: &CapProblem,
) -> Result<(f64, f64)> {
    debug_assert!(fa.signum() != fb.signum());
    while b - a > 1e-6 {
        let mid = 0.5 * (a + b);
        let fm = eval_residual(mid, m, problem)?;
        if fm == 0.0 {
            return Ok((mid, fm));
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    let mut side = 0i8;
    for _ in 0..200 {
        if b - a <= NU_TOL * b.abs().max(1.0) {
            break;
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = eval_residual(x, m, problem)?;
        if fx == 0.0 {
            return Ok((x, fx));
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5; // Illinois damping keeps both endpoints moving
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    if fa.abs() <= fb.abs() {
        Ok((a, fa))
    } else {
        Ok((b, fb))
    }
}

/// All eigenvalues of order `m` with `ν < nu_max`, ascending in `ν`, plus
/// any grid diagnostics for this order.
pub fn cap_roots_for_order(
    m: u32,
    problem: &CapProblem,
) -> Result<(Vec<CapEigenvalue>, Vec<String>)> {
    problem.validate()?;
    let start = scan_start(m, problem);
    if start >= problem.nu_max {
        return Ok((vec![], vec![]));
    }
    // One node past nu_max closes brackets around roots just below it.
    let n_nodes = ((problem.nu_max - start) / SCAN_STEP).floor() as usize + 2;
    let nodes: Vec<f64> = (0..n_nodes).map(|k| start + k as f64 * SCAN_STEP).collect();
    let values: Vec<f64> = nodes
        .par_iter()
        .map(|&nu| eval_residual(nu, m, problem))
        .collect::<Result<Vec<_>>>()?;

    let mut roots = Vec::new();
    let mut warnings = Vec::new();
    let push = |roots: &mut Vec<CapEigenvalue>, nu: f64, residual: f64| {
        if nu < problem.nu_max {
            roots.push(CapEigenvalue {
                m,
                nu,
                lambda: nu * (nu + 1.0),
                residual,
            });
        }
    };
    for k in 0..n_nodes {
        if values[k] == 0.0 {
            push(&mut roots, nodes[k], 0.0);
            continue;
        }
        if k + 1 < n_nodes && values[k + 1] != 0.0 && values[k].signum() != values[k + 1].signum()
        {
            let (nu, res) = refine(nodes[k], values[k], nodes[k + 1], values[k + 1], m, problem)?;
            push(&mut roots, nu, res);
        }
        // Same-sign dip deep enough that the interpolating parabola crosses
        // zero: two roots may hide inside one cell — surface it.
        if k >= 2
            && values[k - 2].signum() == values[k].signum()
            && values[k - 1].signum() == values[k].signum()
            && values[k - 1].abs() < values[k - 2].abs()
            && values[k - 1].abs() < values[k].abs()
        {
            let (y0, y1, y2) = (values[k - 2], values[k - 1], values[k]);
            let curve = y0 - 2.0 * y1 + y2;
            if curve != 0.0 {
                let vertex = y1 - (y2 - y0) * (y2 - y0) / (8.0 * curve);
                if vertex.signum() != y1.signum() {
                    warnings.push(format!(
                        "order {m}: residual dip near nu = {:.4} may hide an unresolved \
                         root pair (grid step {SCAN_STEP})",
                        nodes[k - 1]
                    ));
                }
            }
        }
    }
    Ok((roots, warnings))
}

impl CapProblem {
    fn validate(&self) -> Result<()> {
        CapProblem::new(self.theta0, self.bc, self.nu_max).map(|_| ())
    }
}

/// Sweep orders `m = 0, 1, 2, …`, collecting every eigenvalue with
/// `ν < nu_max`. The sweep stops after two consecutive orders come back
/// empty (first roots grow with `m`; the second empty order is a guard
/// against an accidental near-ceiling miss).
pub fn cap_spectrum(problem: &CapProblem) -> Result<CapSpectrum> {
    problem.validate()?;
    let mut eigenvalues = Vec::new();
    let mut counts_per_m = Vec::new();
    let mut warnings = Vec::new();
    let mut empty_streak = 0u32;
    let mut m = 0u32;
    loop {
        let (roots, mut warns) = cap_roots_for_order(m, problem)?;
        counts_per_m.push(roots.len() as u64);
        warnings.append(&mut warns);
        if roots.is_empty() {
            empty_streak += 1;
            if empty_streak >= 2 {
                break;
            }
        } else {
            empty_streak = 0;
        }
        eigenvalues.extend(roots);
        m += 1;
    }
    while counts_per_m.last() == Some(&0) {
        counts_per_m.pop();
    }
    eigenvalues.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.m.cmp(&b.m)));
    Ok(CapSpectrum {
        eigenvalues,
        counts_per_m,
        warnings,
    })
}

/// Spacing statistics of a cap spectrum: the unit-mean-normalized
/// nearest-neighbor spacing histogram and the KS distance to the
/// exponential law `1 − e^{−s}`.
pub fn cap_spacing_report(problem: &CapProblem) -> Result<(SpacingHistogram, f64)> {
    let spec = cap_spectrum(problem)?;
    cap_spacing_of(&spec)
}

/// As [`cap_spacing_report`], for an already-computed spectrum.
pub fn cap_spacing_of(spec: &CapSpectrum) -> Result<(SpacingHistogram, f64)> {
    if spec.eigenvalues.len() < 500 {
        return Err(Error::InsufficientSample {
            needed: 500,
            got: spec.eigenvalues.len(),
        });
    }
    let lambdas: Vec<f64> = spec.eigenvalues.iter().map(|e| e.lambda).collect();
    let hist = spacing_histogram_of_levels(&lambdas, &BinSpec::default())?;
    let mut spacings: Vec<f64> = lambdas
        .windows(2)
        .map(|w| (w[1] - w[0]) / hist.mean_raw_spacing)
        .collect();
    spacings.sort_by(f64::total_cmp);
    let ks = ks_distance(&spacings, |s| 1.0 - (-s).exp());
    Ok((hist, ks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::secular::solve_nu;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn first_roots(th0: f64, bc: BoundaryCondition, m: u32, nu_max: f64) -> Vec<f64> {
        let p = CapProblem::new(th0, bc, nu_max).unwrap();
        cap_roots_for_order(m, &p)
            .unwrap()
            .0
            .iter()
            .map(|e| e.nu)
            .collect()
    }

    #[test]
    fn dirichlet_third_cap_low_orders() {
        let r = first_roots(FRAC_PI_3, BoundaryCondition::Dirichlet, 0, 5.0);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 1.7772882701589462274705).abs() < 5e-9, "{}", r[0]);
        assert!((r[1] - 4.762779437772532642805601).abs() < 5e-9, "{}", r[1]);
        let r = first_roots(FRAC_PI_3, BoundaryCondition::Dirichlet, 5, 9.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 8.416193321715965126296007).abs() < 5e-9, "{}", r[0]);
    }

    #[test]
    fn dirichlet_third_cap_high_orders() {
        let r = first_roots(FRAC_PI_3, BoundaryCondition::Dirichlet, 60, 75.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 74.48706261510683515083039).abs() < 5e-9, "{}", r[0]);
        let r = first_roots(FRAC_PI_3, BoundaryCondition::Dirichlet, 81, 99.5);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 99.25509351910145876584055).abs() < 5e-9, "{}", r[0]);
    }

    #[test]
    fn neumann_and_robin_third_cap() {
        let r = first_roots(FRAC_PI_3, BoundaryCondition::Neumann, 0, 4.0);
        assert_eq!(r.len(), 2, "nu = 0 plus the first positive root");
        assert_eq!(r[0], 0.0);
        assert!((r[1] - 3.1956911510122148606633).abs() < 5e-9, "{}", r[1]);
        let r = first_roots(FRAC_PI_3, BoundaryCondition::Robin(1.0), 0, 1.5);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.7666467153975850799607781).abs() < 5e-9, "{}", r[0]);
    }

    #[test]
    fn wide_and_narrow_caps() {
        // Opening angle beyond the equator (negative x0, pure ODE path).
        let r = first_roots(2.2, BoundaryCondition::Dirichlet, 2, 3.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.232887624258169625300844).abs() < 5e-9, "{}", r[0]);
        // Narrow cap: roots scale like Bessel zeros over theta0.
        let r = first_roots(0.15, BoundaryCondition::Dirichlet, 1, 26.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 25.04960673130617357661407).abs() < 5e-9, "{}", r[0]);
    }

    #[test]
    fn hemisphere_parity_dirichlet() {
        let p = CapProblem::new(FRAC_PI_2, BoundaryCondition::Dirichlet, 8.5).unwrap();
        let spec = cap_spectrum(&p).unwrap();
        for e in &spec.eigenvalues {
            let k = e.nu.round();
            assert!((e.nu - k).abs() < 1e-9, "nu {} not integral", e.nu);
            assert_eq!((k as i64 - e.m as i64).rem_euclid(2), 1, "nu-m must be odd");
        }
        // Orders m = 0..=7 contribute 4,4,3,3,2,2,1,1 odd-offset degrees < 8.5.
        assert_eq!(spec.counts_per_m, vec![4, 4, 3, 3, 2, 2, 1, 1]);
    }

    #[test]
    fn hemisphere_parity_neumann() {
        let p = CapProblem::new(FRAC_PI_2, BoundaryCondition::Neumann, 6.5).unwrap();
        let spec = cap_spectrum(&p).unwrap();
        for e in &spec.eigenvalues {
            let k = e.nu.round();
            assert!((e.nu - k).abs() < 1e-9, "nu {} not integral", e.nu);
            assert_eq!((k as i64 - e.m as i64).rem_euclid(2), 0, "nu-m must be even");
        }
        // m = 0 sees 0,2,4,6; m = 1 sees 1,3,5; ...; m = 6 sees 6.
        assert_eq!(spec.counts_per_m, vec![4, 3, 3, 2, 2, 1, 1]);
    }

    #[test]
    fn hemisphere_robin_matches_secular_roots() {
        let p = CapProblem::new(FRAC_PI_2, BoundaryCondition::Robin(1.0), 6.0).unwrap();
        let spec = cap_spectrum(&p).unwrap();
        let mut expected = Vec::new();
        for ell in 0u32..6 {
            let mut m = ell % 2;
            while m <= ell {
                expected.push((solve_nu(ell, m, 1.0).unwrap().nu, m));
                m += 2;
            }
        }
        expected.retain(|&(nu, _)| nu < 6.0);
        expected.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        assert_eq!(spec.eigenvalues.len(), expected.len());
        for (e, (nu, m)) in spec.eigenvalues.iter().zip(&expected) {
            assert_eq!(e.m, *m);
            assert!(
                (e.nu - nu).abs() <= 1e-8 * nu,
                "m={} cap {} vs secular {}",
                m,
                e.nu,
                nu
            );
        }
    }

    #[test]
    fn residuals_counts_and_warnings() {
        let p = CapProblem::new(FRAC_PI_3, BoundaryCondition::Dirichlet, 20.0).unwrap();
        let spec = cap_spectrum(&p).unwrap();
        assert!(spec.warnings.is_empty(), "{:?}", spec.warnings);
        assert!(!spec.is_empty());
        for e in &spec.eigenvalues {
            assert!(e.residual.abs() <= 1e-8, "residual {} at {:?}", e.residual, e);
            assert!(e.nu < 20.0);
            assert_eq!(e.lambda, e.nu * (e.nu + 1.0));
        }
        for w in spec.counts_per_m.windows(2) {
            assert!(w[1] <= w[0], "counts per order must be weakly decreasing");
        }
        // Within one order, degrees are simple and ascending.
        let (roots, _) = cap_roots_for_order(0, &p).unwrap();
        for w in roots.windows(2) {
            assert!(w[1].nu > w[0].nu);
        }
    }

    #[test]
    fn partial_weyl_law_third_cap() {
        // Counting function vs (area / 8π)·Λ = Λ/8 for the π/3 cap.
        let p = CapProblem::new(FRAC_PI_3, BoundaryCondition::Dirichlet, 50.0).unwrap();
        let spec = cap_spectrum(&p).unwrap();
        for &big_lambda in &[2000.0, 2200.0, 2500.0] {
            let n = spec
                .eigenvalues
                .iter()
                .filter(|e| e.lambda <= big_lambda)
                .count() as f64;
            let weyl = big_lambda / 8.0;
            assert!(
                (n / weyl - 1.0).abs() < 0.10,
                "N({big_lambda}) = {n} vs Weyl {weyl}"
            );
        }
    }

    #[test]
    fn raw_residual_hemisphere_anchors() {
        let d = CapProblem::new(FRAC_PI_2, BoundaryCondition::Dirichlet, 5.0).unwrap();
        assert!(cap_residual(0, 1.0, &d).unwrap().abs() < 1e-15);
        let n = CapProblem::new(FRAC_PI_2, BoundaryCondition::Neumann, 5.0).unwrap();
        assert!(cap_residual(0, 2.0, &n).unwrap().abs() < 1e-15);
        // Robin raw residual at the secular root vanishes to scale.
        let root = solve_nu(3, 1, 1.0).unwrap();
        let r = CapProblem::new(FRAC_PI_2, BoundaryCondition::Robin(1.0), 5.0).unwrap();
        let at_root = cap_residual(1, root.nu, &r).unwrap();
        let off_root = cap_residual(1, root.nu + 0.1, &r).unwrap();
        assert!(at_root.abs() < 1e-8 * off_root.abs());
    }

    #[test]
    fn spacing_report_needs_a_sample() {
        let p = CapProblem::new(FRAC_PI_3, BoundaryCondition::Dirichlet, 10.0).unwrap();
        assert!(matches!(
            cap_spacing_report(&p),
            Err(Error::InsufficientSample { needed: 500, .. })
        ));
    }

    #[test]
    fn rejects_invalid_problems() {
        assert!(CapProblem::new(0.0, BoundaryCondition::Dirichlet, 10.0).is_err());
        assert!(CapProblem::new(PI, BoundaryCondition::Dirichlet, 10.0).is_err());
        assert!(CapProblem::new(1.0, BoundaryCondition::Dirichlet, 0.0).is_err());
        assert!(CapProblem::new(1.0, BoundaryCondition::Robin(-1.0), 10.0).is_err());
        let p = CapProblem::new(1.0, BoundaryCondition::Dirichlet, 10.0).unwrap();
        assert!(cap_residual(0, -1.0, &p).is_err());
        assert!(cap_residual(0, f64::NAN, &p).is_err());
    }
}
