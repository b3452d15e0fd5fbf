//! Univariate quotient rings R[U]/(q(U)) for a monic modulus q.
//!
//! Elements are dense polynomials of degree < deg q over the base ring; the
//! modulus is shared. Inversion is provided over ℚ by the extended Euclidean
//! algorithm; a failed inversion surfaces the gcd so callers can split the
//! modulus (dynamic evaluation).

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::Rat;
use crate::ring::{FieldLike, InvertError, Rationals, Ring};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct PolyModRing<B: Ring> {
    pub base: B,
    pub modulus: Arc<Poly<B::El>>,
}

impl<B: Ring> PolyModRing<B> {
    /// The modulus must be monic of positive degree (checked by the caller
    /// over its own ring; over ℚ use [`PolyModRing::new_rational`]).
    pub fn new(base: B, modulus: Poly<B::El>) -> Self {
        assert!(
            modulus.degree().map_or(false, |d| d >= 1),
            "modulus must have positive degree"
        );
        PolyModRing {
            base,
            modulus: Arc::new(modulus),
        }
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap()
    }

    pub fn reduce(&self, p: &Poly<B::El>) -> Poly<B::El> {
        Poly::rem_monic(&self.base, p, &self.modulus)
    }

    /// The class of U.
    pub fn generator(&self) -> Poly<B::El> {
        self.reduce(&Poly::new(
            &self.base,
            vec![self.base.zero(), self.base.one()],
        ))
    }
}

impl PolyModRing<Rationals> {
    pub fn new_rational(modulus: Poly<Rat>) -> Self {
        let monic = modulus.monic();
        PolyModRing::new(Rationals, monic)
    }

    /// Inverse by extended Euclid, or the gcd obstruction.
    pub fn try_invert(&self, a: &Poly<Rat>) -> Result<Poly<Rat>> {
        match self.invert(a) {
            Ok(v) => Ok(v),
            Err(InvertError::Zero) => Err(Error::NotInvertible {
                gcd: (*self.modulus).clone(),
            }),
            Err(InvertError::ZeroDivisor(g)) => Err(Error::NotInvertible { gcd: g }),
        }
    }
}

impl<B: Ring> Ring for PolyModRing<B> {
    type El = Poly<B::El>;

    fn zero(&self) -> Self::El {
        Poly::zero()
    }
    fn one(&self) -> Self::El {
        Poly::constant(&self.base, self.base.one())
    }
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El {
        Poly::add(&self.base, a, b)
    }
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El {
        Poly::sub(&self.base, a, b)
    }
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El {
        self.reduce(&Poly::mul(&self.base, a, b))
    }
    fn neg(&self, a: &Self::El) -> Self::El {
        Poly::neg(&self.base, a)
    }
    fn from_rat(&self, q: &Rat) -> Self::El {
        Poly::constant(&self.base, self.base.from_rat(q))
    }
    fn is_zero(&self, a: &Self::El) -> bool {
        a.is_zero_poly()
    }
}

impl FieldLike for PolyModRing<Rationals> {
    fn invert(&self, a: &Poly<Rat>) -> std::result::Result<Poly<Rat>, InvertError> {
        if a.is_zero_poly() {
            return Err(InvertError::Zero);
        }
        let (g, u, _) = a.extended_gcd(&self.modulus);
        if g.is_one() {
            Ok(self.reduce(&u))
        } else {
            // The gcd is a proper monic factor of the modulus.
            Err(InvertError::ZeroDivisor(g))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qpoly;
    use crate::rational::{rat, ratio};

    #[test]
    fn invert_u_mod_u2_minus_2() {
        // U^{-1} = U/2 mod U^2-2
        let ring = PolyModRing::new_rational(qpoly(&[-2, 0, 1]));
        let u = ring.generator();
        let inv = ring.try_invert(&u).unwrap();
        assert_eq!(inv, Poly::from_rats(vec![rat(0), ratio(1, 2)]));
        assert_eq!(ring.mul(&u, &inv), ring.one());
    }

    #[test]
    fn mul_by_one() {
        let ring = PolyModRing::new_rational(qpoly(&[1, 0, 0, 1]));
        let e = qpoly(&[2, 5, 1]);
        assert_eq!(ring.mul(&e, &ring.one()), e);
    }

    #[test]
    fn invert_random_mod_squarefree_deg6() {
        let m = qpoly(&[2, 1, 0, -3, 0, 0, 1]);
        assert!(m.is_squarefree());
        let ring = PolyModRing::new_rational(m);
        let e = qpoly(&[1, -4, 0, 2, 7]);
        let inv = ring.try_invert(&e).unwrap();
        assert_eq!(ring.mul(&e, &inv), ring.one());
    }

    #[test]
    fn zero_divisor_reports_gcd() {
        // modulus (U-1)(U-2), element U-1
        let ring = PolyModRing::new_rational(qpoly(&[2, -3, 1]));
        let e = qpoly(&[-1, 1]);
        match ring.try_invert(&e) {
            Err(Error::NotInvertible { gcd }) => assert_eq!(gcd, qpoly(&[-1, 1])),
            other => panic!("expected NotInvertible, got {other:?}"),
        }
    }
}
