//! Small exact-arithmetic helpers shared by the partition and placement math.

use num_bigint::{BigInt, ToBigInt};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn ratio_u32(num: u32, den: u32) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact rational from an `f64` (which is itself a dyadic rational).
pub fn from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Round to the nearest integer with exact ties rounding down.
pub fn round_half_down_u32(x: &BigRational) -> u32 {
    debug_assert!(!x.is_negative());
    let two = int(2);
    let floor = x.floor();
    let frac = x - &floor;
    let n = if frac * &two > BigRational::one() {
        floor + BigRational::one()
    } else {
        floor
    };
    n.to_integer().to_u32().expect("chunk count fits in u32")
}

/// Deterministic rational approximation of sqrt(x), accurate far beyond any
/// tolerance used by the partition oracle. Newton iterations on rationals
/// from an f64 seed, then truncated to a fixed denominator so downstream
/// arithmetic stays small.
pub fn sqrt_approx(x: &BigRational) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    assert!(x.is_positive(), "sqrt of negative rational");
    let seed = to_f64(x).sqrt();
    let mut y = from_f64(seed.max(f64::MIN_POSITIVE)).unwrap();
    let two = int(2);
    for _ in 0..3 {
        y = (&y + x / &y) / &two;
    }
    // truncate to denominator 10^30
    let scale = BigInt::from(10u32).pow(30);
    let scaled = (y * BigRational::from_integer(scale.clone())).floor();
    BigRational::new(scaled.to_integer().to_bigint().unwrap(), scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_ties_go_down() {
        assert_eq!(round_half_down_u32(&ratio_u32(15, 2)), 7); // 7.5 -> 7
        assert_eq!(round_half_down_u32(&ratio_u32(76, 10)), 8); // 7.6 -> 8
        assert_eq!(round_half_down_u32(&ratio_u32(74, 10)), 7); // 7.4 -> 7
        assert_eq!(round_half_down_u32(&int(3)), 3);
        assert_eq!(round_half_down_u32(&BigRational::zero()), 0);
    }

    #[test]
    fn sqrt_is_tight() {
        for n in [2u32, 10, 70, 12345] {
            let s = sqrt_approx(&int(n as i64));
            let err = (&s * &s - int(n as i64)).abs();
            assert!(err < BigRational::new(BigInt::from(1), BigInt::from(10u32).pow(25)));
        }
        assert!(sqrt_approx(&BigRational::zero()).is_zero());
    }
}
