//! Sparse multivariate polynomials over ℚ.
//!
//! A small utility domain used to densify straight-line programs (evaluate a
//! program at the coordinate generators), read off exact degrees, and provide
//! symbolic-differentiation oracles in tests. Not a performance-critical
//! path.

use crate::poly::Poly;
use crate::rational::Rat;
use crate::ring::Ring;
use num::Zero;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    pub nvars: usize,
    /// exponent vector -> nonzero coefficient
    pub terms: BTreeMap<Vec<u32>, Rat>,
}

#[derive(Clone, Copy, Debug)]
pub struct MultiPolyRing {
    pub nvars: usize,
}

impl MultiPolyRing {
    pub fn new(nvars: usize) -> Self {
        MultiPolyRing { nvars }
    }
}

impl MultiPoly {
    pub fn var(ring: &MultiPolyRing, i: usize) -> Self {
        assert!(i < ring.nvars);
        let mut e = vec![0u32; ring.nvars];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, Rat::from(num::BigInt::from(1)));
        MultiPoly {
            nvars: ring.nvars,
            terms,
        }
    }

    /// Total degree; None for the zero polynomial.
    pub fn total_degree(&self) -> Option<usize> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            let nc = c * Rat::from(num::BigInt::from(e[var]));
            if !nc.is_zero() {
                terms.insert(ne, nc);
            }
        }
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    term *= x;
                }
            }
            acc += term;
        }
        acc
    }

    /// Converts a univariate multipolynomial to a dense polynomial.
    pub fn to_univariate(&self) -> Option<Poly<Rat>> {
        if self.nvars != 1 {
            return None;
        }
        let deg = self.terms.keys().map(|e| e[0] as usize).max().unwrap_or(0);
        let mut coeffs = vec![Rat::zero(); deg + 1];
        for (e, c) in &self.terms {
            coeffs[e[0] as usize] = c.clone();
        }
        Some(Poly::from_rats(coeffs))
    }
}

impl Ring for MultiPolyRing {
    type El = MultiPoly;

    fn zero(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: BTreeMap::new(),
        }
    }
    fn one(&self) -> MultiPoly {
        self.from_rat(&Rat::from(num::BigInt::from(1)))
    }
    fn add(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        let mut terms = a.terms.clone();
        for (e, c) in &b.terms {
            let entry = terms.entry(e.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
    }
    fn sub(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        self.add(a, &self.neg(b))
    }
    fn mul(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = terms.entry(e.clone()).or_insert_with(Rat::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    terms.remove(&e);
                }
            }
        }
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
    }
    fn neg(&self, a: &MultiPoly) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: a.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
    fn from_rat(&self, q: &Rat) -> MultiPoly {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(vec![0u32; self.nvars], q.clone());
        }
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
    }
    fn is_zero(&self, a: &MultiPoly) -> bool {
        a.terms.is_empty()
    }
}

/// Densifies a single-output program: exact sparse expansion.
pub fn densify(slp: &crate::slp::Slp) -> crate::error::Result<MultiPoly> {
    let ring = MultiPolyRing::new(slp.num_inputs);
    let gens: Vec<MultiPoly> = (0..slp.num_inputs)
        .map(|i| MultiPoly::var(&ring, i))
        .collect();
    Ok(slp.eval(&ring, &gens)?.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::slp::parse;

    #[test]
    fn densify_and_degree() {
        let f = parse("(x1+x2)^3 - x1^3", &["x1", "x2"]).unwrap();
        let d = densify(&f).unwrap();
        assert_eq!(d.total_degree(), Some(3));
        // 3 x1^2 x2 + 3 x1 x2^2 + x2^3
        assert_eq!(d.terms.len(), 3);
        assert_eq!(d.eval(&[rat(1), rat(1)]), rat(7));
    }

    #[test]
    fn derivative_basic() {
        let ring = MultiPolyRing::new(2);
        let x = MultiPoly::var(&ring, 0);
        let y = MultiPoly::var(&ring, 1);
        let f = ring.mul(&ring.mul(&x, &x), &y); // x^2 y
        let fx = f.derivative(0); // 2xy
        assert_eq!(fx, ring.mul(&ring.from_i64(2), &ring.mul(&x, &y)));
    }
}
