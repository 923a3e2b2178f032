//! Passage-time scalars.
//!
//! The solver and oracle are written against [`Time`], so the same code runs
//! on integer lattice values (two-point weights with integral `a`, `b`),
//! exact rationals, or floating point for continuous weight laws.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive, Zero};

pub trait Time:
    Num + Copy + PartialOrd + Debug + Display + ToPrimitive + Send + Sync + 'static
{
    /// Largest difference still treated as a tie.
    fn tolerance() -> Self;

    /// Exact conversion, or `None` when `x` has no exact representation.
    fn from_weight(x: f64) -> Option<Self>;

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn ties(self, other: Self) -> bool {
        let d = if self > other { self - other } else { other - self };
        d <= Self::tolerance()
    }

    /// `self > other` beyond the tie tolerance.
    fn exceeds(self, other: Self) -> bool {
        self > other && !self.ties(other)
    }

    fn is_exact() -> bool {
        Self::tolerance().is_zero()
    }

    /// Nonnegative integer key for bucket-queue Dijkstra, when the scalar has one.
    fn bucket_key(self) -> Option<u64> {
        None
    }
}

impl Time for i64 {
    fn tolerance() -> Self {
        0
    }

    fn bucket_key(self) -> Option<u64> {
        u64::try_from(self).ok()
    }

    fn from_weight(x: f64) -> Option<Self> {
        if x.fract() == 0.0 && x.abs() < (1u64 << 53) as f64 {
            Some(x as i64)
        } else {
            None
        }
    }
}

impl Time for Ratio<i64> {
    fn tolerance() -> Self {
        Ratio::zero()
    }

    fn from_weight(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        let (mantissa, exponent, sign) = Float::integer_decode(x);
        let mantissa = i64::try_from(mantissa).ok()? * i64::from(sign);
        if exponent >= 0 {
            if exponent >= 63 {
                return None;
            }
            let scale = 1i64 << exponent;
            Some(Ratio::from_integer(mantissa.checked_mul(scale)?))
        } else {
            // Cancel powers of two first so small dyadics stay small.
            let shift = mantissa.trailing_zeros().min(exponent.unsigned_abs() as u32);
            let mantissa = mantissa >> shift;
            let denom_shift = exponent.unsigned_abs() as u32 - shift;
            if denom_shift >= 63 {
                return None;
            }
            Some(Ratio::new(mantissa, 1i64 << denom_shift))
        }
    }
}

impl Time for f64 {
    fn tolerance() -> Self {
        1e-9
    }

    fn from_weight(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }
}

impl Time for f32 {
    fn tolerance() -> Self {
        1e-4
    }

    fn from_weight(x: f64) -> Option<Self> {
        let y = f32::from_f64(x)?;
        (y.is_finite() && f64::from(y) == x).then_some(y)
    }
}

/// Heap key ordering for `Time` values that are never NaN.
pub(crate) fn total_cmp<W: Time>(a: &W, b: &W) -> std::cmp::Ordering {
    a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_conversion_is_exact_only() {
        assert_eq!(i64::from_weight(2.0), Some(2));
        assert_eq!(i64::from_weight(2.5), None);
    }

    #[test]
    fn rational_conversion_recovers_dyadics() {
        assert_eq!(Ratio::<i64>::from_weight(0.75), Some(Ratio::new(3, 4)));
        assert_eq!(Ratio::<i64>::from_weight(3.0), Some(Ratio::from_integer(3)));
        assert_eq!(Ratio::<i64>::from_weight(-0.5), Some(Ratio::new(-1, 2)));
        let tenth = Ratio::<i64>::from_weight(0.1).unwrap();
        assert_eq!(tenth.to_f64().unwrap(), 0.1);
    }

    #[test]
    fn float_ties_use_tolerance() {
        assert!(1.0f64.ties(1.0 + 1e-12));
        assert!(!1.0f64.exceeds(1.0 + 1e-12));
        assert!((1.0f64 + 1e-6).exceeds(1.0));
        assert!(2i64.exceeds(1));
        assert!(!2i64.ties(1));
    }
}
