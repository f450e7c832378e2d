//! Statistics of the Robin–Neumann gaps and of the level spacings.
//!
//! Within a cluster `ℓ` the gaps `d_{ℓ,m}(σ)`, viewed as a probability
//! ensemble over the admissible orders, converge weakly to an explicit law
//! supported on `[4σ/π, ∞)` with CDF `√(1 − (4σ/(πy))²)`; their arithmetic
//! mean tends to `2σ`, and the extreme member `m = ℓ` escapes to `+∞` like
//! `(2σ/√π)√ℓ`. Globally, consecutive eigenvalues cluster so strongly that
//! the unit-mean-normalized spacing distribution collapses to a point mass
//! at the origin. This module measures all of these effects on computed
//! spectra and provides the Kolmogorov–Smirnov machinery used throughout.

use crate::error::{Error, Result};
use crate::spectrum::{cluster_size, Cluster, Spectrum};
use serde::{Deserialize, Serialize};

/// Uniform binning on `[0, hi)` plus one overflow bin `[hi, ∞)`.
#[derive(Clone, Copy, Debug)]
pub struct BinSpec {
    pub n_bins: usize,
    pub hi: f64,
}

impl Default for BinSpec {
    fn default() -> Self {
        BinSpec { n_bins: 100, hi: 5.0 }
    }
}

impl BinSpec {
    pub fn new(n_bins: usize, hi: f64) -> Result<Self> {
        if n_bins == 0 || !(hi > 0.0) || !hi.is_finite() {
            return Err(Error::domain(format!(
                "bin spec requires n_bins >= 1 and finite hi > 0, got {n_bins}, {hi}"
            )));
        }
        Ok(BinSpec { n_bins, hi })
    }

    fn width(&self) -> f64 {
        self.hi / self.n_bins as f64
    }
}

/// Histogram of unit-mean-normalized nearest-neighbor spacings.
///
/// `counts` has one entry per finite bin plus a trailing overflow bin that
/// absorbs everything `≥ bin_edges.last()`; the sum of all counts is
/// `n_samples`. `mean_raw_spacing` is the divisor that normalized the raw
/// differences.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpacingHistogram {
    /// `n_bins + 1` ascending finite edges `0, w, 2w, …, hi`.
    pub bin_edges: Vec<f64>,
    /// `n_bins + 1` counts; the last is the overflow bin `[hi, ∞)`.
    pub counts: Vec<u64>,
    pub n_samples: u64,
    pub mean_raw_spacing: f64,
}

impl SpacingHistogram {
    pub fn overflow_count(&self) -> u64 {
        *self.counts.last().expect("histogram has at least one bin")
    }

    /// Probability density per finite bin (overflow excluded).
    pub fn densities(&self) -> Vec<f64> {
        let n = self.n_samples.max(1) as f64;
        self.bin_edges
            .windows(2)
            .zip(&self.counts)
            .map(|(e, &c)| c as f64 / (n * (e[1] - e[0])))
            .collect()
    }
}

/// The Robin–Neumann gaps of one cluster, ordered by ascending `m`
/// (equivalently ascending gap, since the degree grows with the order).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapSample {
    pub ell: u32,
    pub sigma: f64,
    /// `rn_gap` values in ascending-`m` order; the last entry is `m = ℓ`.
    pub gaps: Vec<f64>,
}

impl GapSample {
    pub fn from_cluster(cluster: &Cluster) -> Result<Self> {
        if cluster.entries.len() != cluster_size(cluster.ell) {
            return Err(Error::domain(format!(
                "cluster {} is incomplete: {} of {} entries",
                cluster.ell,
                cluster.entries.len(),
                cluster_size(cluster.ell)
            )));
        }
        Ok(GapSample {
            ell: cluster.ell,
            sigma: cluster.sigma,
            gaps: cluster.entries.iter().map(|r| r.rn_gap).collect(),
        })
    }
}

/// CDF of the limiting within-cluster gap distribution:
/// `0` on `(−∞, 4σ/π]`, then `√(1 − (4σ/(πy))²)`.
pub fn szego_cdf(y: f64, sigma: f64) -> f64 {
    assert!(sigma > 0.0, "szego_cdf requires sigma > 0, got {sigma}");
    let y0 = 4.0 * sigma / std::f64::consts::PI;
    if y <= y0 {
        0.0
    } else {
        let r = y0 / y;
        (1.0 - r * r).sqrt()
    }
}

/// Independent check of [`szego_cdf`]: composite-Simpson quadrature of the
/// limit density `16σ²/(π²y³√(1−(4σ/(πy))²))` from the support edge to `y`.
/// The inverse-square-root edge singularity is removed by the substitution
/// `t = √(y − y₀)`, which turns the integrand into the smooth
/// `2y₀²/((y₀+t²)²√(2y₀+t²))`.
pub fn szego_cdf_quadrature(y: f64, sigma: f64, panels: usize) -> f64 {
    assert!(sigma > 0.0 && panels >= 2);
    let y0 = 4.0 * sigma / std::f64::consts::PI;
    if y <= y0 {
        return 0.0;
    }
    let t_max = (y - y0).sqrt();
    let g = |t: f64| {
        let yy = y0 + t * t;
        2.0 * y0 * y0 / (yy * yy * (yy + y0).sqrt())
    };
    let n = panels * 2; // Simpson needs an even node count
    let h = t_max / n as f64;
    let mut acc = g(0.0) + g(t_max);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(i as f64 * h);
    }
    acc * h / 3.0
}

/// Arithmetic mean of the Robin–Neumann gaps of one cluster.
pub fn cluster_gap_mean(cluster: &Cluster) -> Result<f64> {
    if cluster.entries.is_empty() {
        return Err(Error::EmptyCluster { ell: cluster.ell });
    }
    Ok(cluster.entries.iter().map(|r| r.rn_gap).sum::<f64>() / cluster.entries.len() as f64)
}

/// Kolmogorov–Smirnov sup-distance between the empirical CDF of an
/// ascending-sorted sample and a reference CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// KS distance between a cluster's gap sample and the limiting law.
///
/// The `m = ℓ` member grows like `√ℓ` and escapes every compact set, so it
/// is excluded; the remaining `⌊ℓ/2⌋` gaps are compared against
/// [`szego_cdf`]. Requires `ℓ ≥ 50` for a meaningful sample.
pub fn szego_ks_distance(sample: &GapSample) -> Result<f64> {
    if (sample.ell as usize) < 50 {
        return Err(Error::InsufficientSample {
            needed: 50,
            got: sample.ell as usize,
        });
    }
    if sample.gaps.len() != cluster_size(sample.ell) {
        return Err(Error::domain(format!(
            "gap sample for ell={} has {} entries, expected {}",
            sample.ell,
            sample.gaps.len(),
            cluster_size(sample.ell)
        )));
    }
    if !(sample.sigma > 0.0) {
        return Err(Error::domain(
            "the limiting gap law is defined for sigma > 0",
        ));
    }
    let mut bulk: Vec<f64> = sample.gaps[..sample.gaps.len() - 1].to_vec();
    bulk.sort_by(f64::total_cmp);
    Ok(ks_distance(&bulk, |y| szego_cdf(y, sample.sigma)))
}

/// Empirical constants of the quarter-power gap bound, from a Robin
/// spectrum paired with its Neumann reference at the same `ell_max`.
///
/// Index pairing is (ℓ, m)-pairing: clusters are interval-confined and
/// internally ordered by `m`, so the `n`-th entries of both spectra belong
/// to the same mode and the difference `λ_n(σ) − λ_n(0)` is the stored
/// `rn_gap`. Returns `(C_emp, c_emp)` where
/// `C_emp = max_{n≥1} d_n / (λ_n(0)^{1/4} σ)` over the whole spectrum and
/// `c_emp` is the same maximum restricted to the extreme family `m = ℓ`
/// (the modes that realize the growth). `n = 0` is skipped: its reference
/// eigenvalue is `0`.
pub fn gap_bound_constants(robin: &Spectrum, neumann: &Spectrum) -> Result<(f64, f64)> {
    if !(robin.sigma > 0.0) || neumann.sigma != 0.0 {
        return Err(Error::domain(format!(
            "expected a sigma > 0 spectrum paired with a sigma = 0 reference, got {} and {}",
            robin.sigma, neumann.sigma
        )));
    }
    if robin.ell_max < 10 {
        return Err(Error::domain(
            "gap_bound_constants needs ell_max >= 10",
        ));
    }
    if robin.ell_max != neumann.ell_max || robin.eigenvalues.len() != neumann.eigenvalues.len() {
        return Err(Error::MismatchedSpectra(format!(
            "ell_max {} vs {}, {} vs {} eigenvalues",
            robin.ell_max,
            neumann.ell_max,
            robin.eigenvalues.len(),
            neumann.eigenvalues.len()
        )));
    }
    let sigma = robin.sigma;
    let mut c_all = 0.0f64;
    let mut c_top = 0.0f64;
    for (r, nref) in robin.eigenvalues.iter().zip(&neumann.eigenvalues) {
        if r.ell != nref.ell || r.m != nref.m {
            return Err(Error::MismatchedSpectra(format!(
                "index {} pairs ({}, {}) with ({}, {})",
                r.n, r.ell, r.m, nref.ell, nref.m
            )));
        }
        if nref.lambda == 0.0 {
            continue; // the ground mode has no reference scale
        }
        let ratio = r.rn_gap / (nref.lambda.powf(0.25) * sigma);
        c_all = c_all.max(ratio);
        if r.m == r.ell {
            c_top = c_top.max(ratio);
        }
    }
    Ok((c_all, c_top))
}

/// Raw consecutive differences normalized to unit mean, plus that mean.
fn normalized_spacings(lambdas: &[f64]) -> Result<(Vec<f64>, f64)> {
    if lambdas.len() < 2 {
        return Err(Error::InsufficientSample {
            needed: 2,
            got: lambdas.len(),
        });
    }
    let diffs: Vec<f64> = lambdas.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::domain(
            "spacing normalization needs a strictly positive mean spacing",
        ));
    }
    Ok((diffs.iter().map(|d| d / mean).collect(), mean))
}

/// Bin pre-normalized spacings into a [`SpacingHistogram`].
pub fn histogram_of(normalized: &[f64], mean_raw: f64, bins: &BinSpec) -> SpacingHistogram {
    let w = bins.width();
    let mut counts = vec![0u64; bins.n_bins + 1];
    for &s in normalized {
        let idx = ((s / w) as usize).min(bins.n_bins);
        counts[idx] += 1;
    }
    let bin_edges = (0..=bins.n_bins).map(|i| i as f64 * w).collect();
    SpacingHistogram {
        bin_edges,
        counts,
        n_samples: normalized.len() as u64,
        mean_raw_spacing: mean_raw,
    }
}

/// Spacing histogram of a sorted list of eigenvalues.
pub fn spacing_histogram_of_levels(lambdas: &[f64], bins: &BinSpec) -> Result<SpacingHistogram> {
    let (norm, mean) = normalized_spacings(lambdas)?;
    Ok(histogram_of(&norm, mean, bins))
}

/// Nearest-neighbor spacing distribution of a spectrum: raw consecutive
/// differences, divided by their mean, binned per `bins`.
pub fn spacing_distribution(spectrum: &Spectrum, bins: &BinSpec) -> Result<SpacingHistogram> {
    let lambdas: Vec<f64> = spectrum.eigenvalues.iter().map(|r| r.lambda).collect();
    spacing_histogram_of_levels(&lambdas, bins)
}

/// Fraction of unit-mean-normalized spacings strictly exceeding `y`.
pub fn spacing_tail_fraction(spectrum: &Spectrum, y: f64) -> Result<f64> {
    let lambdas: Vec<f64> = spectrum.eigenvalues.iter().map(|r| r.lambda).collect();
    let (norm, _) = normalized_spacings(&lambdas)?;
    Ok(norm.iter().filter(|&&s| s > y).count() as f64 / norm.len() as f64)
}

/// Number of raw (unnormalized) consecutive differences strictly
/// exceeding `y`.
pub fn raw_tail_count(spectrum: &Spectrum, y: f64) -> Result<u64> {
    if spectrum.eigenvalues.len() < 2 {
        return Err(Error::InsufficientSample {
            needed: 2,
            got: spectrum.eigenvalues.len(),
        });
    }
    Ok(spectrum
        .eigenvalues
        .windows(2)
        .filter(|w| w[1].lambda - w[0].lambda > y)
        .count() as u64)
}
