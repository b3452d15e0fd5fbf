//! Exact sign determination at the sample points and assembly of the
//! feasible sign-condition list.
//!
//! For every geometric resolution, each input polynomial is composed with
//! the parametrization modulo q and its sign at every real root of q is
//! computed by a Tarski query; witnesses of each realized condition are
//! recorded as (resolution index, root index). Strict conditions realized
//! under the regularity hypothesis can be completed by replacing "="
//! entries with "<" or ">"; those derived conditions carry no witness and
//! are flagged.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quotient::PolyModRing;
use crate::rational::Rat;
use crate::resolution::GeometricResolution;
use crate::slp::Slp;
use crate::sturm::{isolate_real_roots, sign_at_root, RootLoc};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignKind {
    /// entries mean <, =, >
    Strict,
    /// entries mean <=, =, >=
    Closed,
}

/// A sign condition over the m input polynomials, with the points that
/// realize it. `derived` conditions come from equality expansion and carry
/// no witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignCondition {
    pub kind: SignKind,
    /// one entry in {-1, 0, 1} per polynomial
    pub signs: Vec<i8>,
    /// (resolution index, root index)
    pub witnesses: Vec<(usize, usize)>,
    pub derived: bool,
}

/// Real roots of one resolution with the exact signs of every polynomial.
#[derive(Clone, Debug)]
pub struct SignMatrix {
    pub roots: Vec<RootLoc>,
    /// rows per root, one sign in {-1,0,1} per polynomial
    pub signs: Vec<Vec<i8>>,
}

/// Composes the outputs of `f` with the parametrization of `res`, reducing
/// modulo q: the residue polynomials of degree < deg q.
pub fn compose_mod(f: &Slp, res: &GeometricResolution) -> Result<Vec<Poly<Rat>>> {
    if res.is_empty() {
        return Ok(vec![Poly::zero(); f.num_outputs()]);
    }
    let v = res.v_form()?;
    if v.len() != f.num_inputs {
        return Err(Error::Arity {
            expected: f.num_inputs,
            got: v.len(),
        });
    }
    let ring = PolyModRing::new_rational(res.q.clone());
    f.eval(&ring, &v)
}

/// Signs of a single residue polynomial at every real root of the
/// squarefree q, in root order.
pub fn signs_at_roots(q: &Poly<Rat>, g: &Poly<Rat>) -> Vec<i8> {
    let roots = isolate_real_roots(q);
    roots.iter().map(|r| sign_at_root(q, r, g)).collect()
}

/// Builds the sign matrix of a resolution against the input polynomials.
pub fn sign_matrix(res: &GeometricResolution, fs: &[Slp]) -> Result<SignMatrix> {
    if res.is_empty() {
        return Ok(SignMatrix {
            roots: vec![],
            signs: vec![],
        });
    }
    if !res.q.is_squarefree() {
        return Err(Error::CorruptResolution("q is not squarefree".into()));
    }
    let residues: Vec<Vec<Poly<Rat>>> = fs
        .iter()
        .map(|f| compose_mod(f, res))
        .collect::<Result<_>>()?;
    let roots = isolate_real_roots(&res.q);
    let signs = roots
        .iter()
        .map(|r| {
            residues
                .iter()
                .map(|g| sign_at_root(&res.q, r, &g[0]))
                .collect()
        })
        .collect();
    Ok(SignMatrix { roots, signs })
}

/// Lists the distinct sign conditions realized by the sample points.
///
/// Strict kind: the realized vectors over {<,=,>}. Closed kind: the realized
/// vectors over {<=,=,>=}, where a zero entry satisfies all three relations.
/// Every returned condition carries at least one witness.
pub fn list_conditions(
    resolutions: &[GeometricResolution],
    fs: &[Slp],
    kind: SignKind,
) -> Result<(Vec<SignCondition>, Vec<SignMatrix>)> {
    let matrices: Vec<SignMatrix> = resolutions
        .iter()
        .map(|r| sign_matrix(r, fs))
        .collect::<Result<_>>()?;
    let mut seen: BTreeMap<Vec<i8>, Vec<(usize, usize)>> = BTreeMap::new();
    for (ri, m) in matrices.iter().enumerate() {
        for (root_i, row) in m.signs.iter().enumerate() {
            match kind {
                SignKind::Strict => {
                    seen.entry(row.clone()).or_default().push((ri, root_i));
                }
                SignKind::Closed => {
                    // a zero entry satisfies <=, = and >=
                    let choices: Vec<Vec<i8>> = row
                        .iter()
                        .map(|&s| if s == 0 { vec![-1, 0, 1] } else { vec![s] })
                        .collect();
                    let mut stack: Vec<Vec<i8>> = vec![vec![]];
                    for c in &choices {
                        let mut next = Vec::with_capacity(stack.len() * c.len());
                        for p in &stack {
                            for &v in c {
                                let mut q = p.clone();
                                q.push(v);
                                next.push(q);
                            }
                        }
                        stack = next;
                    }
                    for cond in stack {
                        seen.entry(cond).or_default().push((ri, root_i));
                    }
                }
            }
        }
    }
    let conds = seen
        .into_iter()
        .map(|(signs, witnesses)| SignCondition {
            kind,
            signs,
            witnesses,
            derived: false,
        })
        .collect();
    Ok((conds, matrices))
}

/// Completes a realized strict list by replacing any subset of the "="
/// entries of each condition with "<" or ">" (sound under the regularity
/// hypothesis). The result contains its input; added conditions are flagged
/// derived and carry no witness.
pub fn expand_equalities(realized: &[SignCondition]) -> Vec<SignCondition> {
    let mut out: BTreeMap<Vec<i8>, SignCondition> = BTreeMap::new();
    for c in realized {
        debug_assert_eq!(c.kind, SignKind::Strict);
        out.insert(c.signs.clone(), c.clone());
    }
    for c in realized {
        let zero_pos: Vec<usize> = c
            .signs
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 0)
            .map(|(i, _)| i)
            .collect();
        // all substitutions over {-1, 0, 1} per zero entry
        let mut variants = vec![c.signs.clone()];
        for &i in &zero_pos {
            let mut next = Vec::with_capacity(variants.len() * 3);
            for v in &variants {
                for s in [-1i8, 0, 1] {
                    let mut w = v.clone();
                    w[i] = s;
                    next.push(w);
                }
            }
            variants = next;
        }
        for v in variants {
            out.entry(v.clone()).or_insert(SignCondition {
                kind: SignKind::Strict,
                signs: v,
                witnesses: vec![],
                derived: true,
            });
        }
    }
    out.into_values().collect()
}

/// Renders a sign vector, e.g. "<0>" for (-1, 0, 1) strict or "≤0≥" closed.
pub fn render_signs(signs: &[i8], kind: SignKind) -> String {
    signs
        .iter()
        .map(|&s| match (kind, s) {
            (SignKind::Strict, -1) => '<',
            (SignKind::Strict, 1) => '>',
            (SignKind::Closed, -1) => '≤',
            (SignKind::Closed, 1) => '≥',
            (_, _) => '=',
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qpoly;
    use crate::rational::rat;
    use crate::ring::Rationals;
    use crate::slp::parse;

    fn sqrt2_pair() -> GeometricResolution {
        GeometricResolution::from_v_form(qpoly(&[-2, 0, 1]), &[qpoly(&[0, 1]), Poly::zero()])
    }

    #[test]
    fn compose_mod_examples() {
        let res = sqrt2_pair();
        // f = x1 composes to U
        let f = parse("x1", &["x1", "x2"]).unwrap();
        assert_eq!(compose_mod(&f, &res).unwrap()[0], qpoly(&[0, 1]));
        // constants stay constants
        let c = parse("7", &["x1", "x2"]).unwrap();
        assert_eq!(compose_mod(&c, &res).unwrap()[0], qpoly(&[7]));
    }

    #[test]
    fn signs_at_roots_examples() {
        assert_eq!(signs_at_roots(&qpoly(&[-2, 0, 1]), &qpoly(&[0, 1])), vec![-1, 1]);
        assert_eq!(signs_at_roots(&qpoly(&[1, 0, 1]), &qpoly(&[0, 1])), Vec::<i8>::new());
    }

    #[test]
    fn signs_vs_interval_oracle_random() {
        // the acceptance oracle path re-verifies with interval refinement;
        // here a quick spot check against direct evaluation at the exact or
        // refined locations
        let q = Poly::mul(
            &Rationals,
            &qpoly(&[-9, 0, 1]),
            &Poly::mul(&Rationals, &qpoly(&[-1, 1]), &qpoly(&[5, 1])),
        );
        let g = qpoly(&[5, -3, 0, 1]); // no root in common with q
        let roots = isolate_real_roots(&q);
        assert_eq!(roots.len(), 4);
        for r in &roots {
            let s = sign_at_root(&q, r, &g);
            // refine far enough that the interval determines the sign of g
            let mut loc = r.clone();
            for _ in 0..40 {
                loc = crate::sturm::refine_root(&q, &loc);
            }
            let probe = match &loc {
                RootLoc::Exact(v) => g.eval(&Rationals, v),
                RootLoc::Interval(a, b) => {
                    let mid = (a + b) / rat(2);
                    g.eval(&Rationals, &mid)
                }
            };
            assert_eq!(crate::rational::sign_of(&probe), s, "at {loc:?}");
        }
    }

    #[test]
    fn list_conditions_circle_points() {
        // resolution carrying (±√2, 0) plus a single point (0,0):
        // f = x1^2 + x2^2 - 1 gives signs +,+ at ±√2 and - at the origin
        let f = parse("x1^2 + x2^2 - 1", &["x1", "x2"]).unwrap();
        let a = sqrt2_pair();
        let b = GeometricResolution::single_point(&[rat(0), rat(0)]);
        let (conds, _) = list_conditions(&[a, b], &[f.clone()], SignKind::Strict).unwrap();
        let vecs: Vec<Vec<i8>> = conds.iter().map(|c| c.signs.clone()).collect();
        assert_eq!(vecs, vec![vec![-1], vec![1]]);
        // closed kind: the same points witness <= and >=
        let a = sqrt2_pair();
        let b = GeometricResolution::single_point(&[rat(0), rat(0)]);
        let (closed, _) = list_conditions(&[a, b], &[f], SignKind::Closed).unwrap();
        let vecs: Vec<Vec<i8>> = closed.iter().map(|c| c.signs.clone()).collect();
        assert_eq!(vecs, vec![vec![-1], vec![1]]);
    }

    #[test]
    fn closed_conditions_from_zero_sign() {
        // a point on the circle witnesses all three closed conditions
        let f = parse("x1^2 + x2^2 - 2", &["x1", "x2"]).unwrap();
        let (closed, _) = list_conditions(&[sqrt2_pair()], &[f], SignKind::Closed).unwrap();
        let vecs: Vec<Vec<i8>> = closed.iter().map(|c| c.signs.clone()).collect();
        assert_eq!(vecs, vec![vec![-1], vec![0], vec![1]]);
    }

    #[test]
    fn empty_point_set() {
        let f = parse("x1", &["x1"]).unwrap();
        let (conds, _) = list_conditions(&[], &[f], SignKind::Strict).unwrap();
        assert!(conds.is_empty());
    }

    #[test]
    fn expand_equalities_examples() {
        let c = SignCondition {
            kind: SignKind::Strict,
            signs: vec![0, 1],
            witnesses: vec![(0, 0)],
            derived: false,
        };
        let out = expand_equalities(&[c]);
        let vecs: Vec<Vec<i8>> = out.iter().map(|x| x.signs.clone()).collect();
        assert_eq!(vecs, vec![vec![-1, 1], vec![0, 1], vec![1, 1]]);
        // the witnessed condition stays witnessed, the others are derived
        for c in &out {
            if c.signs == vec![0, 1] {
                assert!(!c.derived);
            } else {
                assert!(c.derived && c.witnesses.is_empty());
            }
        }
        // no equalities: unchanged
        let c2 = SignCondition {
            kind: SignKind::Strict,
            signs: vec![1, -1],
            witnesses: vec![(0, 0)],
            derived: false,
        };
        assert_eq!(expand_equalities(&[c2.clone()]), vec![c2]);
        // circle alone realized (=): the full set {<,=,>}
        let c3 = SignCondition {
            kind: SignKind::Strict,
            signs: vec![0],
            witnesses: vec![(0, 0)],
            derived: false,
        };
        assert_eq!(expand_equalities(&[c3]).len(), 3);
        // closure under substitution: expanding twice is idempotent
        let c4 = SignCondition {
            kind: SignKind::Strict,
            signs: vec![0, 0],
            witnesses: vec![(1, 2)],
            derived: false,
        };
        let once = expand_equalities(&[c4]);
        let twice = expand_equalities(&once);
        assert_eq!(once.len(), 9);
        assert_eq!(once, twice);
    }
}
