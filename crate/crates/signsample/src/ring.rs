//! Commutative ring abstraction.
//!
//! Straight-line programs, dense polynomials and the lifting machinery all
//! run over several coefficient domains: ℚ itself, truncated power series in
//! (t-1), dual numbers carrying first-order tangents, and univariate quotient
//! rings. A ring is a small context object (it may carry a truncation order
//! or a shared modulus); elements are plain data.

use crate::rational::Rat;

pub trait Ring {
    type El: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn from_rat(&self, q: &Rat) -> Self::El;
    fn is_zero(&self, a: &Self::El) -> bool;

    fn from_i64(&self, n: i64) -> Self::El {
        self.from_rat(&crate::rational::rat(n))
    }

    /// Repeated-squaring power.
    fn pow(&self, a: &Self::El, mut e: u32) -> Self::El {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn dot(&self, a: &[Self::El], b: &[Self::El]) -> Self::El {
        assert_eq!(a.len(), b.len());
        let mut acc = self.zero();
        for (x, y) in a.iter().zip(b) {
            acc = self.add(&acc, &self.mul(x, y));
        }
        acc
    }
}

/// Failure mode of an inversion attempt in a ring with zero divisors.
#[derive(Debug, Clone)]
pub enum InvertError {
    /// The element is zero.
    Zero,
    /// The element is a zero divisor; for quotient rings the witness is a
    /// proper monic factor of the modulus, used upstream to split it.
    ZeroDivisor(crate::poly::Poly<Rat>),
}

/// Rings in which inversion of units is effective.
pub trait FieldLike: Ring {
    fn invert(&self, a: &Self::El) -> Result<Self::El, InvertError>;
}

/// The field ℚ.
#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl Ring for Rationals {
    type El = Rat;

    fn zero(&self) -> Rat {
        num::Zero::zero()
    }
    fn one(&self) -> Rat {
        num::One::one()
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a - b
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn neg(&self, a: &Rat) -> Rat {
        -a
    }
    fn from_rat(&self, q: &Rat) -> Rat {
        q.clone()
    }
    fn is_zero(&self, a: &Rat) -> bool {
        num::Zero::is_zero(a)
    }
}

impl FieldLike for Rationals {
    fn invert(&self, a: &Rat) -> Result<Rat, InvertError> {
        if self.is_zero(a) {
            Err(InvertError::Zero)
        } else {
            Ok(self.one() / a)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn pow_and_dot() {
        let qq = Rationals;
        assert_eq!(qq.pow(&rat(3), 4), rat(81));
        assert_eq!(qq.pow(&rat(7), 0), rat(1));
        let d = qq.dot(&[rat(1), rat(2)], &[ratio(1, 2), ratio(1, 4)]);
        assert_eq!(d, rat(1));
    }
}
