//! Minimal double-double arithmetic (~31 significant decimal digits).
//!
//! The hypergeometric series behind the Legendre evaluation is alternating
//! with terms up to ~26 orders of magnitude larger than its sum in the worst
//! cases this crate accepts, so plain `f64` accumulation loses all accuracy.
//! A double-double value `hi + lo` with `|lo| <= ulp(hi)/2` retains roughly
//! 106 bits and absorbs that cancellation. Only the handful of operations the
//! series recurrences need are implemented.

/// Unevaluated sum of two doubles, `hi + lo`, with `|lo|` below one ulp of `hi`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Error-free sum: returns `(s, e)` with `s = fl(a+b)` and `a + b = s + e` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum assuming `|a| >= |b|`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free product via fused multiply-add: `a * b = p + e` exactly.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = f64::mul_add(a, b, -p);
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> f64 {
        self.to_f64().abs()
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s1, e1) = two_sum(self.hi, other.hi);
        let e = e1 + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s1, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e0) = two_prod(self.hi, other.hi);
        let e = e0 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, other: f64) -> Dd {
        let (p, e0) = two_prod(self.hi, other);
        let e = e0 + self.lo * other;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// Quotient accurate to double-double precision (one Newton refinement
    /// of the `f64` quotient).
    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        // r = self - other*q1, evaluated in double-double.
        let r = self.add(other.mul_f64(-q1));
        let q2 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

}
