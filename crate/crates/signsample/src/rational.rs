//! Exact rational scalars.
//!
//! The base field throughout the crate is ℚ, represented by `num`'s
//! `BigRational` (always reduced, positive denominator). No floating point
//! enters any computation path; floats appear only in test oracles.

use num::{BigInt, BigRational, Signed, Zero};

pub type Rat = BigRational;

/// Rational from a machine integer.
pub fn rat(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Rational a/b from machine integers; `b` must be nonzero.
pub fn ratio(a: i64, b: i64) -> Rat {
    Rat::new(BigInt::from(a), BigInt::from(b))
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign_of(x: &Rat) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_invariant() {
        let q = ratio(4, -6);
        assert_eq!(q, ratio(-2, 3));
        assert!(q.denom() > &BigInt::from(0));
        assert_eq!(sign_of(&q), -1);
        assert_eq!(sign_of(&rat(0)), 0);
    }
}
