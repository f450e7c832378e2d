//! Regularized Gauss hypergeometric series
//! `F(a, b; c; z) = Σ_{s≥0} (a)_s (b)_s z^s / (Γ(c+s) s!)`.
//!
//! The sum is alternating for the Legendre parameter sets this crate uses and
//! can cancel catastrophically (terms up to ~10²⁶ times the sum), so the
//! working accumulation runs in double-double arithmetic and reports how many
//! digits the cancellation consumed; callers switch to an independent backend
//! when too few survive.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::specfun::gamma::log_gamma_unchecked;

/// Truncation policy for the hypergeometric series.
#[derive(Clone, Copy, Debug)]
pub struct SeriesControl {
    /// Relative truncation tolerance; summation ends once a geometric-tail
    /// estimate of the remainder drops below `rel_tol × |sum|`.
    pub rel_tol: f64,
    /// Hard cap on the number of terms before a non-convergence error.
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        // Double-precision floor with a safety margin on the term budget.
        SeriesControl {
            rel_tol: 1e-15,
            max_terms: 100_000,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1e-6) {
            return Err(Error::domain(format!(
                "rel_tol must lie in (0, 1e-6), got {}",
                self.rel_tol
            )));
        }
        if self.max_terms < 100 {
            return Err(Error::domain(format!(
                "max_terms must be >= 100, got {}",
                self.max_terms
            )));
        }
        Ok(())
    }
}

/// Outcome of the scaled series: `F(a,b;c;z) = exp(-ln Γ(c)) × sum`.
pub(crate) struct ScaledSeries {
    /// `Γ(c) × F(a,b;c;z)` in double-double.
    pub sum: Dd,
    /// `Γ(c) × dF/dz` in double-double.
    pub dsum_dz: Dd,
    /// Largest `|term| / |sum|` ratio observed — the cancellation factor.
    /// `log10` of this is roughly the number of decimal digits lost.
    pub cancellation: f64,
}

/// Sum `Γ(c) Σ (a)_s (b)_s z^s / ((c)_s s!)` and its z-derivative in
/// double-double, with first term 1. Scaling by `Γ(c)` keeps the first term
/// representable even when `c` is large (plain `1/Γ(c)` underflows for
/// `c > 171`). The entire term recurrence runs in double-double: rounding the
/// factors in `f64` would re-introduce exactly the cancellation error the
/// representation exists to absorb.
pub(crate) fn scaled_series_dd(
    a: f64,
    b: f64,
    c: f64,
    z: f64,
    ctl: &SeriesControl,
) -> Result<ScaledSeries> {
    ctl.validate()?;
    let zdd = Dd::from_f64(z);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut dsum = Dd::ZERO;
    let mut max_abs_term = 1.0f64;
    let mut s = 0usize;
    loop {
        // term_{s+1} = term_s × (a+s)(b+s) z / ((c+s)(s+1)). The factor sums
        // a+s, b+s, c+s must be formed IN double-double (two_sum is exact):
        // rounding them to f64 first plants ~1e-16 noise on every term, which
        // the cancellation ratio then amplifies into the leading digits.
        let sf = s as f64;
        let num = Dd::from_f64(a)
            .add(Dd::from_f64(sf))
            .mul(Dd::from_f64(b).add(Dd::from_f64(sf)))
            .mul(zdd);
        if num.hi == 0.0 {
            // A Pochhammer factor vanished exactly: the series terminates.
            break;
        }
        let den = Dd::from_f64(c).add(Dd::from_f64(sf)).mul_f64(sf + 1.0);
        term = term.mul(num).div(den);
        s += 1;
        sum = sum.add(term);
        // dF/dz = Σ s t_s / z — accumulate s·t_s/z term by term.
        dsum = dsum.add(term.mul_f64(sf + 1.0).div(zdd.is_zero_guard()));
        let t_abs = term.abs();
        if t_abs > max_abs_term {
            max_abs_term = t_abs;
        }
        // Converged once the geometric-tail bound on the remainder,
        // |t| r/(1−r) with r the next-term ratio, drops below rel_tol × |sum|.
        let next_ratio =
            ((a + s as f64) * (b + s as f64) * z / ((c + s as f64) * (s as f64 + 1.0))).abs();
        if next_ratio < 1.0 && t_abs * next_ratio / (1.0 - next_ratio) < ctl.rel_tol * sum.abs() {
            break;
        }
        if s >= ctl.max_terms {
            return Err(Error::NonConvergence(format!(
                "hypergeometric series: {s} terms without meeting rel_tol {}",
                ctl.rel_tol
            )));
        }
    }
    let denom = sum.abs().max(f64::MIN_POSITIVE);
    Ok(ScaledSeries {
        sum,
        dsum_dz: dsum,
        cancellation: max_abs_term / denom,
    })
}

impl Dd {
    /// z = 0 only produces zero terms upstream, but guard the division anyway.
    #[inline]
    fn is_zero_guard(self) -> Dd {
        if self.hi == 0.0 {
            Dd::from_f64(f64::MIN_POSITIVE)
        } else {
            self
        }
    }
}

/// The regularized hypergeometric sum `Σ (a)_s (b)_s z^s / (Γ(c+s) s!)`.
///
/// Requires `|z| < 1` and `c > 0`. Terminates early when a Pochhammer factor
/// vanishes exactly; otherwise stops once the geometric-tail remainder
/// estimate falls below `ctl.rel_tol × |partial sum|`.
pub fn olver_f(a: f64, b: f64, c: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    if !(z.abs() < 1.0) {
        return Err(Error::domain(format!("olver_f requires |z| < 1, got {z}")));
    }
    if !(c > 0.0) {
        return Err(Error::domain(format!("olver_f requires c > 0, got {c}")));
    }
    let series = scaled_series_dd(a, b, c, z, ctl)?;
    Ok(series.sum.to_f64() * (-log_gamma_unchecked(c)).exp())
}
