//! The secular function of the hemisphere Robin problem and its root solver.
//!
//! Separating variables on the half-sphere with the boundary condition
//! `∂F/∂n + σF = 0` on the rim turns the eigenvalue problem into a
//! one-dimensional secular equation per azimuthal order `m`:
//!
//! ```text
//! S_m(ν) = 2 tan(π(ν+m)/2) G(ν+m) G(ν−m) = σ,      G(s) = Γ(s/2+1) / Γ((s+1)/2),
//! ```
//!
//! where `Λ = ν(ν+1)` is the eigenvalue. On each window `ν ∈ (ℓ, ℓ+1)` with
//! `ℓ ≥ m`, `ℓ ≡ m (mod 2)`, the function increases strictly from `0` to
//! `+∞`, so every `σ > 0` is hit exactly once: eigenvalues are the integer
//! grid `ν = ℓ` shifted right by a defect `δ_{ℓm}(σ) ∈ (0, 1)`.
//!
//! Numerical design points:
//!
//! * **Branch below the order.** For `ν < m` the raw product pairs a `tan`
//!   pole with a `G` zero. Reflection collapses it to the manifestly
//!   negative, pole-free form `S_m(ν) = −2 G(ν+m) Γ((u+1)/2)/Γ(u/2)` with
//!   `u = m−ν`, used verbatim (no σ>0 roots live there).
//! * **Pole-free root finding.** The solver never meets the `tan` pole: it
//!   brackets on `p(δ) = 2 sin(πδ/2) G(ℓ+m+δ) G(ℓ−m+δ) − σ cos(πδ/2)`,
//!   which is finite and strictly increasing on `[0, 1]` with a sign change,
//!   then polishes `q = ln S − ln σ` by a bracketed Newton iteration in
//!   `ln δ` (root left of ½) or `ln(1−δ)` (right of ½). Whichever edge
//!   distance is small is carried as its own variable end to end — never
//!   reconstituted by subtraction — so the defect keeps full relative
//!   precision even when `σ` pins it within `1e−300` of a window edge.

use crate::error::{Error, Result};
use crate::specfun::{gamma_ratio_g, ln_g, ln_g_deriv, log_gamma};

/// A sampled value of the secular function: finite, or one of its poles
/// (`ν+m` an odd integer with `ν ≥ m`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SecularPoint {
    Finite(f64),
    Pole,
}

impl SecularPoint {
    pub fn is_pole(&self) -> bool {
        matches!(self, SecularPoint::Pole)
    }

    /// The finite value, if any.
    pub fn value(&self) -> Option<f64> {
        match *self {
            SecularPoint::Finite(v) => Some(v),
            SecularPoint::Pole => None,
        }
    }
}

/// One solved boundary-condition root: the defect `δ ∈ [0, 1)` of the
/// eigenvalue degree `ν = ℓ + δ` off its Neumann position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobinRoot {
    /// Window index (`ν ∈ [ℓ, ℓ+1)`), with `ℓ ≥ m` and `ℓ ≡ m (mod 2)`.
    pub ell: u32,
    /// Azimuthal order.
    pub m: u32,
    /// Boundary parameter `σ > 0`.
    pub sigma: f64,
    /// Defect: the f64 nearest the true `δ ∈ (0, 1)`. For huge `σ` the true
    /// defect sits closer to 1 than one ulp and this rounds to exactly
    /// `1.0`; the right-edge distance survives in [`RobinRoot::co_delta`].
    pub delta: f64,
    /// Complementary defect `1 − δ` at full relative precision — the sharp
    /// coordinate when `σ` pins the root against the right edge. (For tiny
    /// `σ` it is this field that rounds to `1.0` while `delta` stays sharp.)
    pub co_delta: f64,
    /// Degree `ν = ℓ + δ` (nearest f64; equal to `ℓ + 1` for huge `σ`).
    pub nu: f64,
}

impl RobinRoot {
    /// The eigenvalue `Λ = ν(ν+1)`.
    pub fn lambda(&self) -> f64 {
        self.nu * (self.nu + 1.0)
    }

    /// Distance to the `σ = 0` eigenvalue of the same window,
    /// `Λ − ℓ(ℓ+1) = δ(2ℓ+1+δ)`, evaluated in product form (no
    /// cancellation even when `δ ~ 1e−300`).
    pub fn gap_to_neumann(&self) -> f64 {
        self.delta * (2.0 * self.ell as f64 + 1.0 + self.delta)
    }
}

/// Exact parity reduction of `ν+m` modulo 2, in `[0, 2)`.
#[inline]
fn parity_frac(w: f64) -> f64 {
    let r = w - 2.0 * (0.5 * w).floor();
    // Guard against r == 2.0 from rounding at huge w.
    if r >= 2.0 {
        r - 2.0
    } else {
        r
    }
}

/// `tan(πρ/2)` for `ρ ∈ [0, 2)`, quadrant-reduced so the underlying `tan`
/// argument always stays in `[0, π/4]` — full relative accuracy near the
/// zeros at ρ ∈ {0, 2} and near the pole at ρ = 1 alike. The complements
/// `1−ρ`, `ρ−1`, `2−ρ` are exact in f64 on this range.
#[inline]
fn tan_half_pi(rho: f64) -> f64 {
    let t = std::f64::consts::FRAC_PI_2;
    if rho <= 0.5 {
        (t * rho).tan()
    } else if rho <= 1.0 {
        (t * (1.0 - rho)).tan().recip()
    } else if rho <= 1.5 {
        -(t * (rho - 1.0)).tan().recip()
    } else {
        -(t * (2.0 - rho)).tan()
    }
}

fn check_nu_m(nu: f64, _m: u32) -> Result<()> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(Error::domain(format!(
            "secular function requires nu >= 0, got {nu}"
        )));
    }
    Ok(())
}

/// Evaluate `S_m(ν)`.
///
/// Returns [`SecularPoint::Pole`] exactly at the poles (`ν ≥ m`, `ν+m` an
/// odd integer). For `ν < m` the reflected two-Gamma branch is used, which
/// is smooth and strictly negative there.
pub fn secular_s(nu: f64, m: u32) -> Result<SecularPoint> {
    check_nu_m(nu, m)?;
    let mf = m as f64;
    if nu < mf {
        // S = −2 G(ν+m) Γ((u+1)/2) / Γ(u/2), u = m−ν > 0.
        let u = mf - nu;
        let ln = ln_g(nu + mf) + log_gamma(0.5 * (u + 1.0))? - log_gamma(0.5 * u)?;
        return Ok(SecularPoint::Finite(-2.0 * ln.exp()));
    }
    let rho = parity_frac(nu + mf);
    if rho == 1.0 {
        return Ok(SecularPoint::Pole);
    }
    let t = tan_half_pi(rho);
    if t == 0.0 {
        return Ok(SecularPoint::Finite(0.0));
    }
    let ln_gg = ln_g(nu + mf) + ln_g(nu - mf);
    Ok(SecularPoint::Finite(2.0 * t * ln_gg.exp()))
}

/// Logarithmic derivative `d/dν ln S_m(ν)` on the positivity intervals
/// `ν ∈ (m+2k, m+2k+1)`:
///
/// ```text
/// (ln S)'(ν) = π/sin(πδ) + (ln G)'(ν−m) + (ln G)'(ν+m),   δ = (ν−m) mod 2,
/// ```
///
/// which is strictly greater than π there (the sine is ≤ 1 and both
/// `(ln G)'` terms are positive). Outside a positivity interval — at or
/// below the order, on the negative windows, or exactly at a zero or pole —
/// the call is a domain error.
pub fn secular_log_deriv(nu: f64, m: u32) -> Result<f64> {
    check_nu_m(nu, m)?;
    let mf = m as f64;
    let rho = if nu >= mf { parity_frac(nu + mf) } else { 1.0 };
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::domain(format!(
            "log-derivative requires nu in a positivity interval \
             (m+2k, m+2k+1); got nu={nu}, m={m}"
        )));
    }
    let s = (std::f64::consts::PI * rho).sin();
    Ok(std::f64::consts::PI / s + ln_g_deriv(nu - mf) + ln_g_deriv(nu + mf))
}

/// Check the defect bound `δ < √(2/π) σ / √ν` on a solved root. Holds for
/// every genuine root with `σ > 0`; false flags a root that cannot have come
/// from the secular equation.
pub fn delta_bound(root: &RobinRoot) -> bool {
    root.delta < (2.0 / std::f64::consts::PI).sqrt() * root.sigma / root.nu.sqrt()
}

fn check_window(ell: u32, m: u32, sigma: f64) -> Result<()> {
    if m > ell {
        return Err(Error::domain(format!(
            "window requires m <= ell, got ell={ell}, m={m}"
        )));
    }
    if (ell - m) % 2 != 0 {
        return Err(Error::domain(format!(
            "window requires ell ≡ m (mod 2), got ell={ell}, m={m}"
        )));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!(
            "boundary parameter must be finite and > 0, got {sigma}"
        )));
    }
    Ok(())
}

/// `ln S_m(ℓ+δ) − ln σ` on a window, parametrized by the left-edge
/// distance δ: full relative accuracy in δ, so it is the residual of
/// choice when the root sits in the left half of the window.
fn log_residual(ell: u32, m: u32, sigma: f64, delta: f64) -> f64 {
    let l = (ell + m) as f64;
    let k = (ell - m) as f64;
    let ln_tan = if delta <= 0.5 {
        (std::f64::consts::FRAC_PI_2 * delta).tan().ln()
    } else {
        -(std::f64::consts::FRAC_PI_2 * (1.0 - delta)).tan().ln()
    };
    std::f64::consts::LN_2 + ln_tan + ln_g(l + delta) + ln_g(k + delta) - sigma.ln()
}

/// The same residual parametrized by the right-edge distance `e = 1 − δ`:
/// full relative accuracy in `e`, arbitrarily close to the pole at the
/// window's right end. Strictly decreasing in `e` (from +∞ at the pole).
fn log_residual_co(ell: u32, m: u32, sigma: f64, e: f64) -> f64 {
    let l1 = (ell + m) as f64 + 1.0;
    let k1 = (ell - m) as f64 + 1.0;
    let ln_tan = (std::f64::consts::FRAC_PI_2 * e).tan().ln();
    std::f64::consts::LN_2 - ln_tan + ln_g(l1 - e) + ln_g(k1 - e) - sigma.ln()
}

/// `πx / sin(πx)` on `[0, 1)`, overflow-free and full precision for tiny x
/// (series below 1e−4, where the next omitted term is under 2e−16).
fn pi_x_over_sin(x: f64) -> f64 {
    if x < 1e-4 {
        let t = std::f64::consts::PI * x;
        1.0 + t * t / 6.0
    } else {
        std::f64::consts::PI * x / (std::f64::consts::PI * x).sin()
    }
}

/// `d(log residual)/d(ln δ) = δ · q′(δ)` — finite for every δ ∈ (0, 1),
/// tending to 1 as δ → 0.
fn dq_dlog_delta(ell: u32, m: u32, delta: f64) -> f64 {
    let l = (ell + m) as f64;
    let k = (ell - m) as f64;
    pi_x_over_sin(delta) + delta * (ln_g_deriv(l + delta) + ln_g_deriv(k + delta))
}

/// `d(log residual)/d(ln e)` with `e = 1 − δ` — finite, tending to −1 as
/// the root approaches the right edge.
fn dq_dlog_co(ell: u32, m: u32, e: f64) -> f64 {
    let l1 = (ell + m) as f64 + 1.0;
    let k1 = (ell - m) as f64 + 1.0;
    -(pi_x_over_sin(e) + e * (ln_g_deriv(l1 - e) + ln_g_deriv(k1 - e)))
}

/// Bracketed Newton iteration for the zero of `q(exp(s))` in the log
/// coordinate `s`; `q` must be monotone with `q(exp(s_lo)) · q(exp(s_hi))`
/// of opposite (or vanishing) signs. `increasing` states the sign of
/// dq/ds. Absolute accuracy in `s` is relative accuracy of the edge
/// distance `exp(s)`, so the stop threshold is a flat 4e−16-ish step size.
fn log_newton(
    mut s_lo: f64,
    mut s_hi: f64,
    increasing: bool,
    q: impl Fn(f64) -> f64,
    dq_ds: impl Fn(f64) -> f64,
) -> f64 {
    let mut s = 0.5 * (s_lo + s_hi);
    for _ in 0..120 {
        let x = s.exp();
        let qv = q(x);
        if qv == 0.0 {
            return s;
        }
        if (qv < 0.0) == increasing {
            s_lo = s_lo.max(s);
        } else {
            s_hi = s_hi.min(s);
        }
        let newton = s - qv / dq_ds(x);
        let next = if newton > s_lo && newton < s_hi {
            newton
        } else {
            0.5 * (s_lo + s_hi)
        };
        let step = (next - s).abs();
        s = next;
        if step < 4.0e-15 {
            break;
        }
    }
    s
}

/// Solve `S_m(ℓ+δ) = σ` for the unique defect `δ ∈ (0, 1)` of the given
/// window (`σ > 0`). Handles `σ` across the whole f64 range
/// (`1e−300 … 1e300`); the near edge distance — `δ` on the left half,
/// `1 − δ` on the right — comes back accurate to a few ulps times
/// `max(1, |ln σ|/30)` in relative terms.
pub fn solve_nu(ell: u32, m: u32, sigma: f64) -> Result<RobinRoot> {
    check_window(ell, m, sigma)?;
    let l = (ell + m) as f64;
    let k = (ell - m) as f64;
    // Phase 1: bisect the pole-free, strictly increasing
    //   p(δ) = 2 sin(πδ/2) G(L+δ) G(K+δ) − σ cos(πδ/2),
    // which has p(0) = −σ < 0 and p(1) = 2 G G > 0, far enough to decide
    // which half holds the root and hand Newton a short bracket.
    let p = |d: f64| -> f64 {
        let (s, c) = (std::f64::consts::FRAC_PI_2 * d).sin_cos();
        2.0 * s * gamma_ratio_g(l + d).unwrap() * gamma_ratio_g(k + d).unwrap() - sigma * c
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..12 {
        let mid = 0.5 * (lo + hi);
        if p(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Phase 2: bracketed Newton on q = ln S − ln σ in the log of the near
    // edge distance, which is carried as its own variable throughout. The
    // smallest-normal floor on the bracket is unreachable for σ within
    // 1e±300 (the defect scales like σ near the edges, with an O(1)
    // window constant).
    if 0.5 * (lo + hi) <= 0.5 {
        // Root in the left half: iterate on s = ln δ.
        let s_lo = lo.max(f64::MIN_POSITIVE).ln();
        let s_hi = hi.min(0.5).ln();
        let s = log_newton(
            s_lo,
            s_hi,
            true,
            |d| log_residual(ell, m, sigma, d),
            |d| dq_dlog_delta(ell, m, d),
        );
        let delta = s.exp();
        Ok(RobinRoot {
            ell,
            m,
            sigma,
            delta,
            co_delta: 1.0 - delta,
            nu: ell as f64 + delta,
        })
    } else {
        // Root in the right half: iterate on u = ln(1 − δ). The bracket
        // ends 1 − hi and 1 − lo are exact (lo ≥ ½ here).
        let u_lo = (1.0 - hi).max(f64::MIN_POSITIVE).ln();
        let u_hi = (1.0 - lo).min(0.5).ln();
        let u = log_newton(
            u_lo,
            u_hi,
            false,
            |e| log_residual_co(ell, m, sigma, e),
            |e| dq_dlog_co(ell, m, e),
        );
        let e = u.exp();
        Ok(RobinRoot {
            ell,
            m,
            sigma,
            delta: 1.0 - e,
            co_delta: e,
            nu: (ell as f64 + 1.0) - e,
        })
    }
}
