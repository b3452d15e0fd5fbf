//! First-order dual numbers over an arbitrary base ring.
//!
//! An element is a value plus k tangent components: a + Σ ε_j a_j with
//! ε_i ε_j = 0. They thread first-order expansions in (y - α) through all
//! arithmetic without multivariate series.

use crate::rational::Rat;
use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq)]
pub struct Dual<T> {
    pub val: T,
    pub tan: Vec<T>,
}

/// Dual numbers over `base` with `tangents` epsilon directions.
#[derive(Clone, Debug)]
pub struct DualRing<B: Ring> {
    pub base: B,
    pub tangents: usize,
}

impl<B: Ring> DualRing<B> {
    pub fn new(base: B, tangents: usize) -> Self {
        DualRing { base, tangents }
    }

    pub fn lift(&self, v: B::El) -> Dual<B::El> {
        Dual {
            val: v,
            tan: vec![self.base.zero(); self.tangents],
        }
    }

    /// value + ε_j, used to seed a tangent direction.
    pub fn with_tangent(&self, v: B::El, j: usize, t: B::El) -> Dual<B::El> {
        let mut d = self.lift(v);
        d.tan[j] = t;
        d
    }
}

impl<B: Ring> Ring for DualRing<B> {
    type El = Dual<B::El>;

    fn zero(&self) -> Self::El {
        self.lift(self.base.zero())
    }
    fn one(&self) -> Self::El {
        self.lift(self.base.one())
    }
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El {
        Dual {
            val: self.base.add(&a.val, &b.val),
            tan: a
                .tan
                .iter()
                .zip(&b.tan)
                .map(|(x, y)| self.base.add(x, y))
                .collect(),
        }
    }
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El {
        Dual {
            val: self.base.sub(&a.val, &b.val),
            tan: a
                .tan
                .iter()
                .zip(&b.tan)
                .map(|(x, y)| self.base.sub(x, y))
                .collect(),
        }
    }
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El {
        // skip tangent products against zero; lifted constants make these
        // common
        Dual {
            val: self.base.mul(&a.val, &b.val),
            tan: a
                .tan
                .iter()
                .zip(&b.tan)
                .map(|(x, y)| {
                    let left = if self.base.is_zero(x) {
                        None
                    } else {
                        Some(self.base.mul(x, &b.val))
                    };
                    let right = if self.base.is_zero(y) {
                        None
                    } else {
                        Some(self.base.mul(&a.val, y))
                    };
                    match (left, right) {
                        (Some(l), Some(r)) => self.base.add(&l, &r),
                        (Some(l), None) => l,
                        (None, Some(r)) => r,
                        (None, None) => self.base.zero(),
                    }
                })
                .collect(),
        }
    }
    fn neg(&self, a: &Self::El) -> Self::El {
        Dual {
            val: self.base.neg(&a.val),
            tan: a.tan.iter().map(|x| self.base.neg(x)).collect(),
        }
    }
    fn from_rat(&self, q: &Rat) -> Self::El {
        self.lift(self.base.from_rat(q))
    }
    fn is_zero(&self, a: &Self::El) -> bool {
        self.base.is_zero(&a.val) && a.tan.iter().all(|x| self.base.is_zero(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::ring::Rationals;

    #[test]
    fn product_rule() {
        let ring = DualRing::new(Rationals, 2);
        // a = 3 + ε0, b = 5 + ε1: ab = 15 + 5ε0 + 3ε1
        let a = ring.with_tangent(rat(3), 0, rat(1));
        let b = ring.with_tangent(rat(5), 1, rat(1));
        let ab = ring.mul(&a, &b);
        assert_eq!(ab.val, rat(15));
        assert_eq!(ab.tan, vec![rat(5), rat(3)]);
        // ε0 * ε0 = 0
        let sq = ring.mul(&a, &a);
        assert_eq!(sq.val, rat(9));
        assert_eq!(sq.tan, vec![rat(6), rat(0)]);
    }
}
