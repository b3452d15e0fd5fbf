//! Real root isolation and exact sign determination by Sturm sequences.
//!
//! Roots of a squarefree q are isolated by bisection from the Cauchy bound;
//! rational roots hit by a midpoint are deflated out and reported exactly.
//! The sign of g at an isolated root is the Tarski query of the generalized
//! Sturm chain of (q, q' g) over the isolating interval, which for a single
//! root is exactly sign(g(root)). Everything is exact over ℚ.

use crate::poly::Poly;
use crate::rational::{sign_of, Rat};
use crate::ring::Rationals;
use num::{One, Signed, Zero};

/// Location of one real root: exact rational value, or an open interval with
/// rational endpoints containing exactly one root and no other root of the
/// polynomial it was isolated for.
#[derive(Clone, Debug, PartialEq)]
pub enum RootLoc {
    Exact(Rat),
    Interval(Rat, Rat),
}

impl RootLoc {
    pub fn low(&self) -> Rat {
        match self {
            RootLoc::Exact(r) => r.clone(),
            RootLoc::Interval(a, _) => a.clone(),
        }
    }
    pub fn high(&self) -> Rat {
        match self {
            RootLoc::Exact(r) => r.clone(),
            RootLoc::Interval(_, b) => b.clone(),
        }
    }
}

/// Canonical or generalized Sturm chain.
pub struct SturmChain {
    chain: Vec<Poly<Rat>>,
}

impl SturmChain {
    /// Chain of (p0, p1) by negated Euclidean remainders, each remainder
    /// scaled sign-preservingly to control coefficient growth.
    pub fn general(p0: &Poly<Rat>, p1: &Poly<Rat>) -> Self {
        let mut chain = vec![p0.clone(), p1.clone()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero_poly() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero_poly() {
                break;
            }
            let neg = Poly::neg(&Rationals, &r);
            chain.push(sign_preserving_scale(&neg));
        }
        SturmChain { chain }
    }

    /// Canonical chain (q, q').
    pub fn new(q: &Poly<Rat>) -> Self {
        SturmChain::general(q, &q.derivative(&Rationals))
    }

    /// Sign variations at x, skipping exact zeros.
    pub fn variations_at(&self, x: &Rat) -> usize {
        let signs: Vec<i8> = self
            .chain
            .iter()
            .map(|p| sign_of(&p.eval(&Rationals, x)))
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// V(a) - V(b); for the canonical chain of squarefree q with
    /// q(a) q(b) != 0 this is the number of roots in (a, b); for the
    /// generalized chain of (q, q' g) it is Σ sign(g) over those roots.
    pub fn query(&self, a: &Rat, b: &Rat) -> i64 {
        self.variations_at(a) as i64 - self.variations_at(b) as i64
    }
}

fn sign_preserving_scale(p: &Poly<Rat>) -> Poly<Rat> {
    match p.leading() {
        None => Poly::zero(),
        Some(lc) => {
            let s = Rat::one() / lc.abs();
            Poly::from_rats(p.coeffs().iter().map(|c| c * &s).collect())
        }
    }
}

/// Isolates all real roots of a squarefree polynomial, in increasing order.
pub fn isolate_real_roots(q: &Poly<Rat>) -> Vec<RootLoc> {
    assert!(!q.is_zero_poly(), "cannot isolate roots of zero");
    let mut exact: Vec<Rat> = Vec::new();
    let mut work = q.monic();
    let intervals = 'deflate: loop {
        if work.degree() == Some(0) {
            break Vec::new();
        }
        let chain = SturmChain::new(&work);
        let bound = work.root_bound();
        let mut stack = vec![(-bound.clone(), bound)];
        let mut found: Vec<(Rat, Rat)> = Vec::new();
        while let Some((a, b)) = stack.pop() {
            let n = chain.query(&a, &b);
            if n <= 0 {
                continue;
            }
            let mid = (&a + &b) / Rat::from(num::BigInt::from(2));
            if work.eval(&Rationals, &mid).is_zero() {
                exact.push(mid.clone());
                let lin = Poly::from_rats(vec![-mid, Rat::one()]);
                work = work.exact_div(&lin).expect("rational root divides");
                continue 'deflate;
            }
            if n == 1 {
                if chain.query(&a, &mid) == 1 {
                    found.push((a, mid));
                } else {
                    found.push((mid, b));
                }
            } else {
                stack.push((a, mid.clone()));
                stack.push((mid, b));
            }
        }
        // shrink intervals until no deflated exact root touches them, so the
        // endpoints are never roots of the original polynomial
        let mut out = Vec::with_capacity(found.len());
        'next: for (mut a, mut b) in found {
            loop {
                if !exact.iter().any(|r| *r >= a && *r <= b) {
                    out.push(RootLoc::Interval(a, b));
                    continue 'next;
                }
                let mid = (&a + &b) / Rat::from(num::BigInt::from(2));
                if work.eval(&Rationals, &mid).is_zero() {
                    out.push(RootLoc::Exact(mid));
                    continue 'next;
                }
                if chain.query(&a, &mid) == 1 {
                    b = mid;
                } else {
                    a = mid;
                }
            }
        }
        break out;
    };
    let mut all: Vec<RootLoc> = intervals;
    all.extend(exact.into_iter().map(RootLoc::Exact));
    all.sort_by(|x, y| (x.low(), x.high()).cmp(&(y.low(), y.high())));
    // disjointness self-check: open intervals may share an endpoint
    for w in all.windows(2) {
        debug_assert!(w[0].high() <= w[1].low());
    }
    all
}

/// Exact sign of g at the isolated root of q. q must be squarefree and the
/// location must come from `isolate_real_roots(q)`.
pub fn sign_at_root(q: &Poly<Rat>, root: &RootLoc, g: &Poly<Rat>) -> i8 {
    match root {
        RootLoc::Exact(r) => sign_of(&g.eval(&Rationals, r)),
        RootLoc::Interval(a, b) => {
            let qg = Poly::mul(&Rationals, &q.derivative(&Rationals), g);
            let chain = SturmChain::general(q, &qg);
            let v = chain.query(a, b);
            debug_assert!((-1..=1).contains(&v));
            v as i8
        }
    }
}

/// Halves an isolating interval once; exact hits collapse the location.
pub fn refine_root(q: &Poly<Rat>, root: &RootLoc) -> RootLoc {
    match root {
        RootLoc::Exact(_) => root.clone(),
        RootLoc::Interval(a, b) => {
            let mid = (a + b) / Rat::from(num::BigInt::from(2));
            let fm = q.eval(&Rationals, &mid);
            if fm.is_zero() {
                return RootLoc::Exact(mid);
            }
            let fa = q.eval(&Rationals, a);
            if sign_of(&fa) != sign_of(&fm) {
                RootLoc::Interval(a.clone(), mid)
            } else {
                RootLoc::Interval(mid, b.clone())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qpoly;
    use crate::rational::{rat, ratio};

    #[test]
    fn isolate_sqrt2() {
        let q = qpoly(&[-2, 0, 1]);
        let roots = isolate_real_roots(&q);
        assert_eq!(roots.len(), 2);
        // signs of g = U at the two roots: (-, +)
        let g = qpoly(&[0, 1]);
        assert_eq!(sign_at_root(&q, &roots[0], &g), -1);
        assert_eq!(sign_at_root(&q, &roots[1], &g), 1);
    }

    #[test]
    fn no_real_roots() {
        let q = qpoly(&[1, 0, 1]);
        assert!(isolate_real_roots(&q).is_empty());
    }

    #[test]
    fn rational_roots_reported_exactly() {
        // roots 0, 1, -2: the bisection midpoint hits 0 because the Cauchy
        // bound is symmetric
        let q = qpoly(&[0, -2, 1]); // x(x-2)
        let roots = isolate_real_roots(&q);
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().any(|r| matches!(r, RootLoc::Exact(v) if v.is_zero())));
        let g = qpoly(&[-1, 1]); // x - 1
        let signs: Vec<i8> = roots.iter().map(|r| sign_at_root(&q, r, &g)).collect();
        assert_eq!(signs, vec![-1, 1]);
    }

    #[test]
    fn sign_zero_detected() {
        // g vanishes at the isolated root: the Tarski query reports 0
        let q = qpoly(&[-2, 0, 1]);
        let roots = isolate_real_roots(&q);
        let g = qpoly(&[-2, 0, 1]); // same polynomial
        for r in &roots {
            assert_eq!(sign_at_root(&q, r, &g), 0);
        }
        // and a multiple of q times a unit keeps sign 0
        let g2 = Poly::mul(&Rationals, &q, &qpoly(&[5]));
        for r in &roots {
            assert_eq!(sign_at_root(&q, r, &g2), 0);
        }
    }

    #[test]
    fn count_matches_root_number() {
        // degree-5 with three real roots: (x^2+1)(x-1)(x+3)(x-1/2) up to scale
        let q = Poly::mul(
            &Rationals,
            &Poly::mul(&Rationals, &qpoly(&[1, 0, 1]), &qpoly(&[-1, 1])),
            &Poly::mul(&Rationals, &qpoly(&[3, 1]), &Poly::from_rats(vec![ratio(-1, 2), rat(1)])),
        );
        let roots = isolate_real_roots(&q);
        assert_eq!(roots.len(), 3);
        // consistency: Sturm count over the full bound equals the number found
        let chain = SturmChain::new(&q.monic());
        let b = q.root_bound();
        assert_eq!(chain.query(&-b.clone(), &b), 3);
    }

    #[test]
    fn many_roots_random_degree() {
        // product of distinct linear factors: all roots recovered with the
        // right signs for a test polynomial
        let mut q = qpoly(&[1]);
        for r in [-3i64, -1, 0, 2, 5] {
            q = Poly::mul(&Rationals, &q, &qpoly(&[-r, 1]));
        }
        let roots = isolate_real_roots(&q);
        assert_eq!(roots.len(), 5);
        let g = qpoly(&[-1, 0, 1]); // x^2 - 1: signs at -3,-1,0,2,5
        let signs: Vec<i8> = roots.iter().map(|r| sign_at_root(&q, r, &g)).collect();
        assert_eq!(signs, vec![1, 0, -1, 1, 1]);
    }
}
