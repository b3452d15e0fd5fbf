//! Independent brute-force verification: grid feasibility lower bounds and
//! a second, interval-arithmetic path for the sign matrices.
//!
//! The grid oracle evaluates the family exactly at every node of a rational
//! grid; every sign vector it reports is realized at its representative
//! point, so it is a sound lower bound for the feasible strict conditions
//! (and, via closure, for the closed ones) — never an upper bound. The
//! point verifier recomputes every sign by adaptive interval refinement
//! instead of Tarski queries and insists on agreement.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{sign_of, Rat};
use crate::resolution::GeometricResolution;
use crate::ring::Rationals;
use crate::signs::{compose_mod, sign_matrix, SignMatrix};
use crate::slp::Slp;
use crate::sturm::{refine_root, RootLoc, SturmChain};
use num::Zero;
use std::collections::BTreeMap;

/// Strict sign vectors realized at grid nodes, with one exact representative
/// point per vector.
#[derive(Clone, Debug)]
pub struct GridReport {
    pub step: Rat,
    pub lo: Vec<Rat>,
    pub hi: Vec<Rat>,
    pub vectors: BTreeMap<Vec<i8>, Vec<Rat>>,
}

/// Evaluates every polynomial at each node of the grid over the box
/// `[lo_i, hi_i]` with the given step.
pub fn grid_feasible(fs: &[Slp], lo: &[Rat], hi: &[Rat], step: &Rat) -> Result<GridReport> {
    assert!(step > &Rat::zero());
    let n = lo.len();
    let mut vectors: BTreeMap<Vec<i8>, Vec<Rat>> = BTreeMap::new();
    let mut node = lo.to_vec();
    'outer: loop {
        let vec: Vec<i8> = fs
            .iter()
            .map(|f| Ok(sign_of(&f.eval_qq(&node)?[0])))
            .collect::<Result<_>>()?;
        vectors.entry(vec).or_insert_with(|| node.clone());
        // advance odometer
        for i in 0..n {
            node[i] += step;
            if node[i] <= hi[i] {
                continue 'outer;
            }
            node[i] = lo[i].clone();
        }
        break;
    }
    Ok(GridReport {
        step: step.clone(),
        lo: lo.to_vec(),
        hi: hi.to_vec(),
        vectors,
    })
}

/// Box [-b, b]^n derived from the coefficient size of the family.
pub fn default_box(fs: &[Slp]) -> Result<(Vec<Rat>, Vec<Rat>)> {
    let n = fs[0].num_inputs;
    let mut b = Rat::from(num::BigInt::from(2));
    for f in fs {
        let dense = crate::multipoly::densify(f)?;
        let mut sum = Rat::zero();
        for c in dense.terms.values() {
            sum += c.abs();
        }
        if sum > b {
            b = sum;
        }
    }
    use num::Signed;
    Ok((vec![-b.clone(); n], vec![b; n]))
}

/// Exact interval arithmetic evaluation of a polynomial over [a, b].
fn interval_eval(p: &Poly<Rat>, a: &Rat, b: &Rat) -> (Rat, Rat) {
    use num::One;
    let (mut lo, mut hi) = (Rat::zero(), Rat::zero());
    let (mut xlo, mut xhi) = (Rat::one(), Rat::one());
    for c in p.coeffs() {
        // c * x^k over the interval
        let cands = [&xlo * c, &xhi * c];
        let tlo = cands.iter().min().unwrap().clone();
        let thi = cands.iter().max().unwrap().clone();
        lo += tlo;
        hi += thi;
        // next power interval
        let cands = [&xlo * a, &xlo * b, &xhi * a, &xhi * b];
        xlo = cands.iter().min().unwrap().clone();
        xhi = cands.iter().max().unwrap().clone();
    }
    (lo, hi)
}

/// Sign of g at an isolated root of q by interval refinement; exact zeros
/// are certified through gcd(q, g) having the root.
pub fn interval_sign_at_root(q: &Poly<Rat>, root: &RootLoc, g: &Poly<Rat>) -> i8 {
    if g.is_zero_poly() {
        return 0;
    }
    match root {
        RootLoc::Exact(r) => sign_of(&g.eval(&Rationals, r)),
        RootLoc::Interval(a, b) => {
            // g vanishes at the isolated root iff gcd(q, g) has a root in
            // the interval: the gcd divides q, so its roots are roots of q,
            // the interval holds exactly one of those, and the endpoints are
            // no roots of q, hence none of the gcd either.
            let shared = q.gcd(g);
            if shared.degree().map_or(false, |d| d >= 1)
                && SturmChain::new(&shared).query(a, b) >= 1
            {
                return 0;
            }
            // g(root) != 0: refine until the interval evaluation decides
            let mut loc = root.clone();
            loop {
                match &loc {
                    RootLoc::Exact(r) => return sign_of(&g.eval(&Rationals, r)),
                    RootLoc::Interval(a, b) => {
                        let (lo, hi) = interval_eval(g, a, b);
                        if lo > Rat::zero() {
                            return 1;
                        }
                        if hi < Rat::zero() {
                            return -1;
                        }
                        loc = refine_root(q, &loc);
                    }
                }
            }
        }
    }
}

/// Recomputes the sign matrix of a resolution by the interval path and
/// checks agreement with the Tarski-query path.
pub fn verify_point_signs(res: &GeometricResolution, fs: &[Slp]) -> Result<SignMatrix> {
    let tarski = sign_matrix(res, fs)?;
    if res.is_empty() {
        return Ok(tarski);
    }
    let residues: Vec<Poly<Rat>> = fs
        .iter()
        .map(|f| compose_mod(f, res).map(|mut v| v.remove(0)))
        .collect::<Result<_>>()?;
    for (root_i, root) in tarski.roots.iter().enumerate() {
        for (fi, g) in residues.iter().enumerate() {
            let s = interval_sign_at_root(&res.q, root, g);
            if s != tarski.signs[root_i][fi] {
                return Err(Error::Disagreement(format!(
                    "root {root_i}, polynomial {fi}: interval path {s}, Tarski path {}",
                    tarski.signs[root_i][fi]
                )));
            }
        }
    }
    Ok(tarski)
}

/// Eliminates both variables of a bivariate square system against the label
/// u = α_1 x_1 + α_2 x_2: returns E(u) whose roots include the labels of all
/// common solutions. Computed by evaluation/interpolation of
/// Res_{x_2}(f_1(L), f_2(L)) with L the label substitution; returns an error
/// when a leading coefficient degenerates (the caller picks new data).
pub fn label_resultant(f1: &Slp, f2: &Slp, alpha: &[Rat]) -> Result<Poly<Rat>> {
    use crate::multipoly::{densify, MultiPoly};
    if alpha[0].is_zero() {
        return Err(Error::BadAlpha);
    }
    let d1 = densify(f1)?.total_degree().unwrap_or(0);
    let d2 = densify(f2)?.total_degree().unwrap_or(0);
    let bound = d1 * d2;
    // substitute x1 = (u - α2 x2)/α1 symbolically over ℚ[u, x2]
    let subst = |f: &Slp| -> Result<Vec<Poly<Rat>>> {
        let ring = crate::multipoly::MultiPolyRing::new(2);
        let u = MultiPoly::var(&ring, 0);
        let x2 = MultiPoly::var(&ring, 1);
        use crate::ring::Ring;
        let inv_a1 = Rat::from(num::BigInt::from(1)) / &alpha[0];
        let x1 = ring.mul(
            &ring.sub(&u, &ring.mul(&ring.from_rat(&alpha[1]), &x2)),
            &ring.from_rat(&inv_a1),
        );
        let val = f.eval(&ring, &[x1, x2])?.remove(0);
        // coefficients of x2^j as dense polynomials in u
        let dmax = val.terms.keys().map(|e| e[1] as usize).max().unwrap_or(0);
        let mut coeffs: Vec<Vec<Rat>> = vec![vec![]; dmax + 1];
        for (e, c) in &val.terms {
            let (du, dx) = (e[0] as usize, e[1] as usize);
            if coeffs[dx].len() <= du {
                coeffs[dx].resize(du + 1, Rat::zero());
            }
            coeffs[dx][du] = c.clone();
        }
        Ok(coeffs.into_iter().map(Poly::from_rats).collect())
    };
    let c1 = subst(f1)?;
    let c2 = subst(f2)?;
    // leading coefficients in x2 must be nonzero constants in u, otherwise
    // the specialized resultants drop degree
    for c in [&c1, &c2] {
        match c.last() {
            Some(lead) if lead.degree() == Some(0) => {}
            _ => return Err(Error::BadAlpha),
        }
    }
    let eval_at = |cs: &[Poly<Rat>], u0: &Rat| -> Poly<Rat> {
        Poly::from_rats(cs.iter().map(|p| p.eval(&Rationals, u0)).collect())
    };
    let mut points = Vec::with_capacity(bound + 1);
    for i in 0..=bound {
        let u0 = Rat::from(num::BigInt::from(i as i64));
        let r = eval_at(&c1, &u0).resultant(&eval_at(&c2, &u0));
        points.push((u0, r));
    }
    Ok(Poly::interpolate(&points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qpoly;
    use crate::rational::{rat, ratio};
    use crate::slp::parse;

    #[test]
    fn grid_circle() {
        let f = parse("x1^2 + x2^2 - 1", &["x1", "x2"]).unwrap();
        let lo = vec![rat(-2), rat(-2)];
        let hi = vec![rat(2), rat(2)];
        let rep = grid_feasible(&[f], &lo, &hi, &ratio(1, 8)).unwrap();
        assert!(rep.vectors.contains_key(&vec![-1]));
        assert!(rep.vectors.contains_key(&vec![1]));
        // nodes on the circle exist at step 1/8: (±1, 0) etc.
        assert!(rep.vectors.contains_key(&vec![0]));
        // representatives realize their vectors exactly
        for (v, p) in &rep.vectors {
            let f = parse("x1^2 + x2^2 - 1", &["x1", "x2"]).unwrap();
            assert_eq!(vec![crate::rational::sign_of(&f.eval_qq(p).unwrap()[0])], *v);
        }
    }

    #[test]
    fn grid_two_circles_hand_enumeration() {
        // externally tangent unit circles centered at (0,0) and (2,0):
        // vectors (by hand): (-,+) inside left, (+,-) inside right, (+,+)
        // outside both, (0,+)/(+,0) on one circle only, (0,0) at the
        // tangency node (1,0) — all present at step 1/4 on [-3,3]^2;
        // (-,-) and (-,0)/(0,-) are infeasible.
        let f1 = parse("x1^2 + x2^2 - 1", &["x1", "x2"]).unwrap();
        let f2 = parse("(x1-2)^2 + x2^2 - 1", &["x1", "x2"]).unwrap();
        let lo = vec![rat(-3), rat(-3)];
        let hi = vec![rat(3), rat(3)];
        let rep = grid_feasible(&[f1, f2], &lo, &hi, &ratio(1, 4)).unwrap();
        let keys: Vec<Vec<i8>> = rep.vectors.keys().cloned().collect();
        let expect: Vec<Vec<i8>> = vec![
            vec![-1, 1],
            vec![0, 0],
            vec![0, 1],
            vec![1, -1],
            vec![1, 0],
            vec![1, 1],
        ];
        assert_eq!(keys, expect);
    }

    #[test]
    fn dual_path_agreement_toy() {
        let res = GeometricResolution::from_v_form(
            qpoly(&[-2, 0, 1]),
            &[qpoly(&[0, 1]), Poly::zero()],
        );
        let fs = vec![
            parse("x1^2 + x2^2 - 2", &["x1", "x2"]).unwrap(),
            parse("x1 - 1", &["x1", "x2"]).unwrap(),
            parse("x2 + 1", &["x1", "x2"]).unwrap(),
        ];
        let m = verify_point_signs(&res, &fs).unwrap();
        assert_eq!(m.signs, vec![vec![0, -1, 1], vec![0, 1, 1]]);
        // degenerate degree-1 q
        let res1 = GeometricResolution::from_v_form(qpoly(&[-3, 1]), &[qpoly(&[3]), qpoly(&[0])]);
        let m1 = verify_point_signs(&res1, &fs).unwrap();
        assert_eq!(m1.signs, vec![vec![1, 1, 1]]);
    }

    #[test]
    fn label_resultant_known_solutions() {
        // f1 = x1^2 + x2^2 - 2, f2 = x1 - x2: solutions (1,1), (-1,-1);
        // labels u = α1 x1 + α2 x2 = ±(α1+α2)
        let f1 = parse("x1^2 + x2^2 - 2", &["x1", "x2"]).unwrap();
        let f2 = parse("x1 - x2", &["x1", "x2"]).unwrap();
        let alpha = [rat(3), rat(5)];
        let e = label_resultant(&f1, &f2, &alpha).unwrap();
        assert!(e.eval(&Rationals, &rat(8)).is_zero());
        assert!(e.eval(&Rationals, &rat(-8)).is_zero());
        assert_eq!(e.squarefree_part().degree(), Some(2));
    }
}
