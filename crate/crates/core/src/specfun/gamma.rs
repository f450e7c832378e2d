//! Log-Gamma, digamma, and the Gamma ratio `G(s) = Γ(s/2+1) / Γ((s+1)/2)`.
//!
//! Everything downstream (secular equation, Legendre prefactors, boundary
//! residual scalings) assembles Gamma ratios as `exp(Σ ± log_gamma)` so that
//! arguments up to ~10⁴ never overflow.

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_74;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Lanczos coefficients (g = 7, n = 9), accurate to ~1e-15 relative in Γ.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the Gamma function for `s > 0`, relative error ≲ 1e-14.
pub fn log_gamma(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain(format!("log_gamma requires s > 0, got {s}")));
    }
    Ok(log_gamma_unchecked(s))
}

/// Internal total version valid for all `s > 0` (callers guarantee positivity).
pub(crate) fn log_gamma_unchecked(s: f64) -> f64 {
    if s < 0.5 {
        // Reflection keeps the Lanczos argument away from 0, where the
        // rational part loses accuracy. sin(pi*s) > 0 on (0, 1/2).
        LN_PI - (std::f64::consts::PI * s).sin().ln() - lanczos_ln_gamma(1.0 - s)
    } else {
        lanczos_ln_gamma(s)
    }
}

fn lanczos_ln_gamma(s: f64) -> f64 {
    // ln Γ(s) = ln √(2π) + ln A(s) + (s − 1/2) ln t − t,  t = s + g − 1/2.
    let mut acc = LANCZOS_COEF[0];
    for (k, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (s - 1.0 + k as f64);
    }
    let t = s + LANCZOS_G - 0.5;
    LN_SQRT_2PI + acc.ln() + (s - 0.5) * t.ln() - t
}

/// Natural log of `|Γ(t)|` together with the sign of `Γ(t)`, valid for every
/// non-pole real `t`. At a pole (`t` a nonpositive integer) the sign is `0.0`
/// and the log is `+∞`, so `sign * exp(-log_abs)` still gives the correct
/// reciprocal value `1/Γ(t) = 0`.
pub(crate) fn log_gamma_signed(t: f64) -> (f64, f64) {
    if t > 0.0 {
        return (log_gamma_unchecked(t), 1.0);
    }
    if t == t.floor() {
        return (f64::INFINITY, 0.0);
    }
    // Reflection: Γ(t) = π / (sin(πt) Γ(1−t)).
    let s = (std::f64::consts::PI * t).sin();
    let log_abs = LN_PI - s.abs().ln() - log_gamma_unchecked(1.0 - t);
    (log_abs, s.signum())
}

/// Digamma `ψ(s) = Γ'(s)/Γ(s)` for `s > 0`, relative error ≲ 1e-13.
pub fn digamma(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain(format!("digamma requires s > 0, got {s}")));
    }
    Ok(digamma_unchecked(s))
}

pub(crate) fn digamma_unchecked(s: f64) -> f64 {
    // Recurrence ψ(s) = ψ(s+1) − 1/s lifts the argument to the asymptotic
    // zone; the Bernoulli tail then converges to full double precision.
    let mut shift = 0.0;
    let mut x = s;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    // ψ(x) ~ ln x − 1/(2x) − Σ B_{2n} / (2n x^{2n}).
    let inv2 = 1.0 / (x * x);
    // Coefficients B_{2n}/(2n) for n = 1..7.
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    shift + x.ln() - 0.5 / x - tail
}

/// The increasing ratio `G(s) = Γ(s/2 + 1) / Γ((s+1)/2)` for `s ≥ 0`.
///
/// `G` stays between `√(s/2)` and `√(s/2 + 1)`, so it never overflows even
/// for `s` of order 10⁶.
pub fn gamma_ratio_g(s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain(format!(
            "gamma_ratio_g requires s >= 0, got {s}"
        )));
    }
    Ok(ln_g(s).exp())
}

/// `ln G(s)` for `s ≥ 0` (callers guarantee the domain).
pub(crate) fn ln_g(s: f64) -> f64 {
    log_gamma_unchecked(0.5 * s + 1.0) - log_gamma_unchecked(0.5 * (s + 1.0))
}

/// `(ln G)'(s) = (ψ(s/2 + 1) − ψ((s+1)/2)) / 2`, strictly decreasing from
/// `ln 2` at `s = 0` toward `0`; in particular always positive.
pub(crate) fn ln_g_deriv(s: f64) -> f64 {
    0.5 * (digamma_unchecked(0.5 * s + 1.0) - digamma_unchecked(0.5 * (s + 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(got: f64, want: f64) -> f64 {
        (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn log_gamma_pinned_values() {
        assert_eq!(log_gamma(1.0).unwrap().abs() < 1e-14, true);
        assert!(rel_err(log_gamma(0.5).unwrap(), std::f64::consts::PI.sqrt().ln()) < 1e-13);
        assert!(rel_err(log_gamma(10.0).unwrap(), (362880.0f64).ln()) < 1e-13);
        // High-precision reference values.
        assert!(rel_err(log_gamma(0.1).unwrap(), 2.252712651734205959869702) < 1e-13);
        assert!(rel_err(log_gamma(12.34).unwrap(), 18.33778702290023300056592) < 1e-13);
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-3.2).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn log_gamma_duplication_formula() {
        // ln Γ(2s) = ln Γ(s) + ln Γ(s + 1/2) + (2s − 1) ln 2 − ln √π.
        let ln_sqrt_pi = 0.5 * LN_PI;
        for &s in &[0.3, 0.75, 1.0, 2.5, 7.0, 41.25, 1234.5, 9876.25] {
            let lhs = log_gamma(2.0 * s).unwrap();
            let rhs = log_gamma(s).unwrap() + log_gamma(s + 0.5).unwrap()
                + (2.0 * s - 1.0) * std::f64::consts::LN_2
                - ln_sqrt_pi;
            // Hybrid tolerance: the identity sits on a log scale, so absolute
            // error near ln Γ = 0 is the meaningful part.
            assert!(
                (lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0),
                "duplication failed at s={s}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn log_gamma_factorials() {
        let mut fact = 1.0f64;
        for n in 1..=20u32 {
            // Γ(n+1) = n!
            assert!(rel_err(log_gamma(n as f64 + 1.0).unwrap(), fact.ln()) < 1e-13 || n == 1);
            fact *= (n + 1) as f64;
        }
    }

    #[test]
    fn digamma_pinned_values() {
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-13);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-13);
        // ψ(1/2) = −γ − 2 ln 2.
        let want = -EULER_GAMMA - 2.0 * std::f64::consts::LN_2;
        assert!(rel_err(digamma(0.5).unwrap(), want) < 1e-12);
        assert!(rel_err(digamma(0.3).unwrap(), -3.502524222200132988964495) < 1e-12);
        assert!(rel_err(digamma(7.9).unwrap(), 2.002238487563570987751724) < 1e-12);
    }

    #[test]
    fn digamma_recurrence_property() {
        for &s in &[0.17, 0.9, 3.4, 25.0, 400.5] {
            let lhs = digamma(s + 1.0).unwrap();
            let rhs = digamma(s).unwrap() + 1.0 / s;
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn gamma_ratio_pinned_values() {
        let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
        assert!(rel_err(gamma_ratio_g(0.0).unwrap(), inv_sqrt_pi) < 1e-13);
        assert!(rel_err(gamma_ratio_g(1.0).unwrap(), std::f64::consts::PI.sqrt() / 2.0) < 1e-13);
        assert!(rel_err(gamma_ratio_g(0.5).unwrap(), 0.7396687797971597230777) < 1e-13);
        assert!(rel_err(gamma_ratio_g(1e-3).unwrap(), 0.5645805535265436547676) < 1e-13);
        assert!(rel_err(gamma_ratio_g(300.5).unwrap(), 12.26785260915319664887468) < 1e-13);
        let g100 = gamma_ratio_g(100.0).unwrap();
        assert!(g100 > 50.0f64.sqrt() && g100 < 51.0f64.sqrt());
        // No overflow far out.
        assert!(gamma_ratio_g(1e6).unwrap().is_finite());
    }

    #[test]
    fn gamma_ratio_bracketed_and_increasing() {
        // √(s/2) < G(s) < √(s/2 + 1) on a dense grid, and G strictly increases.
        let mut prev = gamma_ratio_g(0.0).unwrap();
        for k in 1..=10_000 {
            let s = 0.1 * k as f64;
            let g = gamma_ratio_g(s).unwrap();
            assert!(
                g > (0.5 * s).sqrt() && g < (0.5 * s + 1.0).sqrt(),
                "bracket failed at s={s}"
            );
            assert!(g > prev, "monotonicity failed at s={s}");
            prev = g;
        }
    }

    #[test]
    fn ln_g_derivative_matches_finite_difference_and_stays_in_band() {
        // (ln G)' decreases from ln 2 at s = 0 toward 0 and stays positive.
        assert!((ln_g_deriv(0.0) - std::f64::consts::LN_2).abs() < 1e-13);
        let mut prev = ln_g_deriv(0.0);
        for k in 1..=200 {
            let s = 0.21 * k as f64;
            let d = ln_g_deriv(s);
            assert!(
                d > 0.0 && d < prev,
                "(ln G)' not decreasing in (0, ln 2] at s={s}"
            );
            prev = d;
            // h balances FD truncation (h²) against ln Γ cancellation (1/h):
            // both stay below ~2e-9 at h = 1e-5 across the whole grid.
            let h = 1e-5;
            let fd = (ln_g(s + h) - ln_g(s - h)) / (2.0 * h);
            assert!((d - fd).abs() < 1e-8, "fd mismatch at s={s}: {d} vs {fd}");
        }
        // Pinned reference value.
        assert!((ln_g_deriv(2.7) - 0.1528063692560863683949453).abs() < 1e-12);
    }

    #[test]
    fn signed_log_gamma_reflection() {
        // Γ(-0.5) = -2√π.
        let (lg, sign) = log_gamma_signed(-0.5);
        assert_eq!(sign, -1.0);
        assert!(rel_err(lg.exp(), 2.0 * std::f64::consts::PI.sqrt()) < 1e-12);
        // Γ(-1.5) = 4√π/3 > 0.
        let (lg, sign) = log_gamma_signed(-1.5);
        assert_eq!(sign, 1.0);
        assert!(rel_err(lg.exp(), 4.0 * std::f64::consts::PI.sqrt() / 3.0) < 1e-12);
        // Poles: sign 0 encodes 1/Γ = 0.
        let (lg, sign) = log_gamma_signed(-3.0);
        assert!(lg.is_infinite() && sign == 0.0);
    }
}
