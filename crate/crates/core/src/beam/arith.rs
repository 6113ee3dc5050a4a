use std::cell::Cell;
use std::fmt::Debug;

use crate::fixedpoint::QProb;

/// Probability arithmetic the decoder runs on.
pub trait Arith {
    type P: Copy + PartialOrd + Debug;

    fn zero(&self) -> Self::P;
    fn one(&self) -> Self::P;
    fn mul(&self, a: Self::P, b: Self::P) -> Self::P;
    fn add(&self, a: Self::P, b: Self::P) -> Self::P;
    /// `p` with `2^p <= a < 2^(p+1)`; `None` for zero.
    fn leading_one(&self, a: Self::P) -> Option<i32>;
    /// Multiply by `2^s`.
    fn shift(&self, a: Self::P, s: i32) -> Self::P;
    fn to_f64(&self, a: Self::P) -> f64;
    #[allow(clippy::wrong_self_convention)]
    fn from_f64(&self, x: f64) -> Self::P;

    fn is_zero(&self, a: Self::P) -> bool {
        self.leading_one(a).is_none()
    }

    /// Number of saturating operations so far.
    fn saturations(&self) -> u64 {
        0
    }
}

/// Unsigned fixed point with `q` fractional bits, truncating and saturating.
#[derive(Debug, Clone)]
pub struct FixedArith {
    q: u8,
    saturations: Cell<u64>,
}

impl FixedArith {
    pub fn new(q: u8) -> Self {
        Self {
            q,
            saturations: Cell::new(0),
        }
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    fn note(&self, sat: bool) {
        if sat {
            self.saturations.set(self.saturations.get() + 1);
        }
    }
}

impl Arith for FixedArith {
    type P = QProb;

    fn zero(&self) -> QProb {
        QProb::zero(self.q)
    }

    fn one(&self) -> QProb {
        QProb::one(self.q)
    }

    fn mul(&self, a: QProb, b: QProb) -> QProb {
        let (p, sat) = a.overflowing_mul(b);
        self.note(sat);
        p
    }

    fn add(&self, a: QProb, b: QProb) -> QProb {
        let (p, sat) = a.overflowing_add(b);
        self.note(sat);
        p
    }

    fn leading_one(&self, a: QProb) -> Option<i32> {
        a.leading_one().ok()
    }

    fn shift(&self, a: QProb, s: i32) -> QProb {
        let (p, sat) = a.overflowing_shift(s);
        self.note(sat);
        p
    }

    fn to_f64(&self, a: QProb) -> f64 {
        a.to_f64()
    }

    fn from_f64(&self, x: f64) -> QProb {
        QProb::from_f64(x, self.q)
    }

    fn saturations(&self) -> u64 {
        self.saturations.get()
    }
}

/// Real-valued probabilities in double precision. Scaling by powers of two
/// is exact, so enabling the adjustment step does not perturb any
/// comparison.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactArith;

impl Arith for ExactArith {
    type P = f64;

    fn zero(&self) -> f64 {
        0.0
    }

    fn one(&self) -> f64 {
        1.0
    }

    fn mul(&self, a: f64, b: f64) -> f64 {
        a * b
    }

    fn add(&self, a: f64, b: f64) -> f64 {
        a + b
    }

    fn leading_one(&self, a: f64) -> Option<i32> {
        if a <= 0.0 || !a.is_finite() {
            return None;
        }
        let bits = a.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i32;
        if exp == 0 {
            // subnormal
            let mantissa = bits & ((1u64 << 52) - 1);
            Some(-1074 + 63 - mantissa.leading_zeros() as i32)
        } else {
            Some(exp - 1023)
        }
    }

    fn shift(&self, a: f64, s: i32) -> f64 {
        // split to keep each factor a normal power of two
        let mut x = a;
        let mut s = s;
        while s != 0 {
            let step = s.clamp(-1000, 1000);
            x *= 2f64.powi(step);
            s -= step;
        }
        x
    }

    fn to_f64(&self, a: f64) -> f64 {
        a
    }

    fn from_f64(&self, x: f64) -> f64 {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_leading_one() {
        let a = ExactArith;
        assert_eq!(a.leading_one(1.0), Some(0));
        assert_eq!(a.leading_one(0.3), Some(-2));
        assert_eq!(a.leading_one(0.0625), Some(-4));
        assert_eq!(a.leading_one(0.06249999), Some(-5));
        assert_eq!(a.leading_one(f64::MIN_POSITIVE / 4.0), Some(-1024));
        assert_eq!(a.leading_one(0.0), None);
        assert_eq!(a.shift(0.75, 3), 6.0);
        assert_eq!(a.shift(6.0, -3), 0.75);
    }

    #[test]
    fn fixed_counts_saturation() {
        let a = FixedArith::new(30);
        let big = QProb::max_value(30);
        let _ = a.add(big, a.one());
        let _ = a.shift(a.one(), 4);
        assert_eq!(a.saturations(), 2);
        assert_eq!(a.leading_one(a.from_f64(0.0625)), Some(-4));
    }
}
