//! Geometric resolutions: univariate rational parametrizations of
//! zero-dimensional sets.
//!
//! A resolution associated with a separating linear form ℓ consists of a
//! squarefree q(U) whose roots are the ℓ-values of the points, a q̃(U)
//! invertible modulo q, and parametrizations w_1, ..., w_n with the k-th
//! coordinate of the point labelled η given by (w_k/q̃)(η). The equivalent
//! (q, v_1, ..., v_n) form has v_k = q̃^{-1} w_k mod q.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::Poly;
use crate::quotient::PolyModRing;
use crate::rational::Rat;
use crate::ring::{Rationals, Ring};
use crate::slp::Slp;

#[derive(Clone, Debug, PartialEq)]
pub struct GeometricResolution {
    /// Squarefree monic minimal polynomial of the separating form.
    pub q: Poly<Rat>,
    /// Denominator of the parametrization, coprime to q.
    pub qtilde: Poly<Rat>,
    /// Numerators, one per coordinate.
    pub w: Vec<Poly<Rat>>,
}

impl GeometricResolution {
    /// Number of coordinates parametrized.
    pub fn ncoords(&self) -> usize {
        self.w.len()
    }

    /// Degree of q, i.e. the number of points counted over ℂ.
    pub fn npoints(&self) -> usize {
        self.q.degree().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.npoints() == 0
    }

    /// A resolution of the empty set.
    pub fn empty(ncoords: usize) -> Self {
        GeometricResolution {
            q: crate::poly::qpoly(&[1]),
            qtilde: crate::poly::qpoly(&[1]),
            w: vec![Poly::zero(); ncoords],
        }
    }

    /// Resolution of a single rational point: q = U - ℓ(p) with the trivial
    /// label ℓ = 0, i.e. q = U.
    pub fn single_point(p: &[Rat]) -> Self {
        GeometricResolution {
            q: Poly::from_rats(vec![Rat::from(num::BigInt::from(0)), Rat::from(num::BigInt::from(1))]),
            qtilde: crate::poly::qpoly(&[1]),
            w: p.iter().map(|c| Poly::constant(&Rationals, c.clone())).collect(),
        }
    }

    /// Standard form parametrizations v_k = q̃^{-1} w_k mod q.
    pub fn v_form(&self) -> Result<Vec<Poly<Rat>>> {
        if self.is_empty() {
            return Ok(vec![Poly::zero(); self.ncoords()]);
        }
        let ring = PolyModRing::new_rational(self.q.clone());
        let qt = ring.reduce(&self.qtilde);
        let inv = ring.try_invert(&qt).map_err(|_| {
            Error::CorruptResolution("q̃ is not invertible modulo q".into())
        })?;
        Ok(self
            .w
            .iter()
            .map(|wk| ring.mul(&inv, &ring.reduce(wk)))
            .collect())
    }

    /// Builds the (q, q', w) normal form from a v-form parametrization.
    pub fn from_v_form(q: Poly<Rat>, v: &[Poly<Rat>]) -> Self {
        let qq = Rationals;
        let dq = q.derivative(&qq);
        let ring = PolyModRing::new_rational(q.clone());
        let w = v.iter().map(|vk| ring.mul(&ring.reduce(vk), &ring.reduce(&dq))).collect();
        GeometricResolution {
            q: q.monic(),
            qtilde: dq,
            w,
        }
    }

    /// Prefixes constant coordinates: the new points are
    /// (c_1, ..., c_k, old coordinates).
    pub fn with_prefix(&self, prefix: &[Rat]) -> Self {
        let mut w = Vec::with_capacity(prefix.len() + self.w.len());
        let ring = Rationals;
        for c in prefix {
            w.push(Poly::scale(&ring, &self.qtilde, c));
        }
        w.extend(self.w.iter().cloned());
        GeometricResolution {
            q: self.q.clone(),
            qtilde: self.qtilde.clone(),
            w,
        }
    }

    /// Applies an exact linear map to the parametrized points: coordinates
    /// become m · (old coordinates).
    pub fn map_linear(&self, m: &Matrix<Rat>) -> Self {
        let qq = Rationals;
        assert_eq!(m[0].len(), self.ncoords());
        let w = m
            .iter()
            .map(|row| {
                let mut acc = Poly::zero();
                for (coef, wk) in row.iter().zip(&self.w) {
                    acc = Poly::add(&qq, &acc, &Poly::scale(&qq, wk, coef));
                }
                acc
            })
            .collect();
        GeometricResolution {
            q: self.q.clone(),
            qtilde: self.qtilde.clone(),
            w,
        }
    }

    /// Residue of a program at the parametrized points: the outputs of
    /// f composed with v, reduced mod q. All-zero residues certify that the
    /// points satisfy f = 0.
    pub fn residuals(&self, f: &Slp) -> Result<Vec<Poly<Rat>>> {
        if self.is_empty() {
            return Ok(vec![Poly::zero(); f.num_outputs()]);
        }
        let v = self.v_form()?;
        let ring = PolyModRing::new_rational(self.q.clone());
        f.eval(&ring, &v)
    }

    /// Merges two resolutions of disjoint point sets with coprime minimal
    /// polynomials: {q q', w q' + w' q} parametrizes the union.
    pub fn merge_coprime(&self, other: &Self) -> Result<Self> {
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        assert_eq!(self.ncoords(), other.ncoords());
        let qq = Rationals;
        if self.q.gcd(&other.q).degree() != Some(0) {
            return Err(Error::BadAlpha);
        }
        let q = Poly::mul(&qq, &self.q, &other.q);
        let qtilde = Poly::add(
            &qq,
            &Poly::mul(&qq, &self.qtilde, &other.q),
            &Poly::mul(&qq, &other.qtilde, &self.q),
        );
        let w = self
            .w
            .iter()
            .zip(&other.w)
            .map(|(a, b)| {
                Poly::add(
                    &qq,
                    &Poly::mul(&qq, a, &other.q),
                    &Poly::mul(&qq, b, &self.q),
                )
            })
            .collect();
        Ok(GeometricResolution { q, qtilde, w })
    }

    /// Restricts the resolution to the roots of a monic factor of q.
    pub fn restrict_to_factor(&self, factor: &Poly<Rat>) -> Self {
        let ring = PolyModRing::new_rational(factor.clone());
        GeometricResolution {
            q: factor.monic(),
            qtilde: ring.reduce(&self.qtilde),
            w: self.w.iter().map(|wk| ring.reduce(wk)).collect(),
        }
    }
}
