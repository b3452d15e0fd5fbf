//! Top-level sample-point drivers.
//!
//! All four modes share one recursion: after a random linear change of
//! variables, for every level k the inputs are sliced at x_1 = p_1, ...,
//! x_{k-1} = p_{k-1} and, for every admissible subset S of them, the
//! critical-point system of the projection to x_k is deformed from an
//! initial system; the resulting geometric resolutions are prefixed with the
//! slice values and mapped back to the original coordinates. The last level
//! contributes the univariate roots on the final slice line and the point p
//! itself.
//!
//! - regular: random p, grid initial systems; sound for families of regular
//!   hypersurfaces intersecting transversally.
//! - closed: p = 0, Chebyshev initial systems, one deformation per sign
//!   pattern τ over the subset; meets every connected component of every
//!   feasible closed sign condition of arbitrary inputs.
//! - bivariate: the regular recursion at n = 2, valid for arbitrary inputs.
//! - single: one polynomial deformed against the positive Chebyshev
//!   equation, p = 0.

use crate::error::{Error, Result};
use crate::homotopy::{deform, DeformOptions, InitialSystem};
use crate::multipoly::densify;
use crate::poly::Poly;
use crate::rational::{rat, Rat};
use crate::resolution::GeometricResolution;
use crate::ring::{Rationals, Ring};
use crate::slp::{ChangeOfVariables, Slp};
use crate::systems::{
    build_lagrange, build_type1, closed_family_system, combinations, single_poly_system,
};
use num::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Regular,
    Closed,
    Bivariate,
    Single,
}

/// Per-polynomial entry of a requested sign pattern; `Any` leaves the
/// polynomial unrestricted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaEntry {
    Lt,
    Eq,
    Gt,
    Any,
}

#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub mode: Mode,
    pub seed: u64,
    /// random coefficients are drawn uniformly from [-coeff_bound, coeff_bound]
    pub coeff_bound: i64,
    pub max_retries: usize,
    /// restricts the subsets S to those containing the pattern's "=" set,
    /// and the sign patterns τ accordingly (closed mode)
    pub sigma: Option<Vec<SigmaEntry>>,
    pub early_exit: bool,
}

impl SamplerConfig {
    pub fn new(mode: Mode, seed: u64) -> Self {
        SamplerConfig {
            mode,
            seed,
            coeff_bound: 1 << 16,
            max_retries: 5,
            sigma: None,
            early_exit: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProvKind {
    /// deformation output for the subset (1-based indices) and sign pattern
    Deformation {
        subset: Vec<usize>,
        tau: Option<Vec<i8>>,
    },
    /// roots of f_i on the final slice line
    Univariate { poly: usize },
    /// the base point p
    BasePoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub level: usize,
    pub kind: ProvKind,
}

/// The computed sample: geometric resolutions in the original coordinates,
/// plus the randomness that produced them.
#[derive(Clone, Debug)]
pub struct SamplePointSet {
    pub resolutions: Vec<(GeometricResolution, Provenance)>,
    pub matrix: ChangeOfVariables,
    pub point: Vec<Rat>,
    pub nvars: usize,
    pub warnings: Vec<String>,
}

pub fn random_point<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Vec<Rat> {
    (0..n).map(|_| rat(rng.gen_range(-bound..=bound))).collect()
}

pub fn random_change_of_variables<R: Rng>(
    rng: &mut R,
    n: usize,
    bound: i64,
) -> ChangeOfVariables {
    loop {
        let m: Vec<Vec<Rat>> = (0..n)
            .map(|_| (0..n).map(|_| rat(rng.gen_range(-bound..=bound))).collect())
            .collect();
        if let Ok(c) = ChangeOfVariables::new(m) {
            return c;
        }
    }
}

/// Entry point for every mode.
pub fn run(fs: &[Slp], degree_bounds: &[usize], cfg: &SamplerConfig) -> Result<SamplePointSet> {
    let m = fs.len();
    let n = if m > 0 {
        fs[0].num_inputs
    } else {
        return Err(Error::Invalid("at least one polynomial required".into()));
    };
    if fs.iter().any(|f| f.num_inputs != n) {
        return Err(Error::Invalid("inconsistent variable counts".into()));
    }
    if degree_bounds.len() != m {
        return Err(Error::Invalid("one degree bound per polynomial required".into()));
    }
    for f in fs {
        if densify(f)?.terms.is_empty() {
            return Err(Error::Invalid("zero polynomial in the input family".into()));
        }
    }
    match cfg.mode {
        Mode::Bivariate if n != 2 => {
            return Err(Error::Invalid("bivariate mode requires exactly 2 variables".into()))
        }
        Mode::Single if m != 1 => {
            return Err(Error::Invalid("single mode requires exactly one polynomial".into()))
        }
        _ => {}
    }
    if let Some(sig) = &cfg.sigma {
        if sig.len() != m {
            return Err(Error::Invalid("sign pattern length must match the family".into()));
        }
    }
    // closed and single modes need one even degree bound dominating all
    let even_d = {
        let mut d = degree_bounds.iter().copied().max().unwrap_or(1).max(2);
        if d % 2 == 1 {
            d += 1;
        }
        d
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut failures: Vec<String> = Vec::new();
    'attempt: for _attempt in 0..cfg.max_retries {
        let mat = random_change_of_variables(&mut rng, n, cfg.coeff_bound);
        let p = match cfg.mode {
            Mode::Closed | Mode::Single => vec![Rat::zero(); n],
            Mode::Regular | Mode::Bivariate => random_point(&mut rng, n, cfg.coeff_bound),
        };
        let f_m: Vec<Slp> = fs.iter().map(|f| f.compose_linear(&mat)).collect();
        // a slice must never kill a polynomial outright; a generic change of
        // variables prevents it
        for k in 1..=n {
            for f in &f_m {
                let sliced = f.substitute_prefix(&p[..k - 1]);
                if densify(&sliced)?.terms.is_empty() {
                    failures.push(format!("degenerate slice at level {k}"));
                    continue 'attempt;
                }
            }
        }
        match run_levels(fs, &f_m, degree_bounds, &mat, &p, even_d, cfg, &mut rng) {
            Ok(set) => return Ok(set),
            Err(e) => {
                failures.push(e.to_string());
                continue 'attempt;
            }
        }
    }
    Err(Error::BadRandomness {
        attempts: cfg.max_retries,
        seed: cfg.seed,
        context: failures.join("; "),
    })
}

#[allow(clippy::too_many_arguments)]
fn run_levels(
    fs: &[Slp],
    f_m: &[Slp],
    degree_bounds: &[usize],
    mat: &ChangeOfVariables,
    p: &[Rat],
    even_d: usize,
    cfg: &SamplerConfig,
    rng: &mut ChaCha8Rng,
) -> Result<SamplePointSet> {
    let n = p.len();
    let m = f_m.len();
    let opts = DeformOptions {
        early_exit: cfg.early_exit,
        max_alpha_retries: cfg.max_retries,
    };
    let eq_set: Vec<usize> = cfg
        .sigma
        .as_ref()
        .map(|sig| {
            sig.iter()
                .enumerate()
                .filter(|(_, e)| **e == SigmaEntry::Eq)
                .map(|(i, _)| i)
                .collect()
        })
        .unwrap_or_default();
    let mut resolutions: Vec<(GeometricResolution, Provenance)> = Vec::new();
    for k in 1..n {
        let n_eff = n - k + 1;
        let f_sub: Vec<Slp> = f_m.iter().map(|f| f.substitute_prefix(&p[..k - 1])).collect();
        let max_s = m.min(n_eff);
        for s in 1..=max_s {
            for combo in combinations(m, s) {
                if !eq_set.iter().all(|i| combo.contains(i)) {
                    continue;
                }
                let target = build_lagrange(&f_sub, &combo, degree_bounds)?;
                let subset_1b: Vec<usize> = combo.iter().map(|i| i + 1).collect();
                match cfg.mode {
                    Mode::Regular | Mode::Bivariate => {
                        let init = build_type1(s, n_eff, &target.degrees)?;
                        let out =
                            deform(&target, InitialSystem::Grid(&init), rng, &opts)?;
                        push_resolution(
                            &mut resolutions,
                            out.resolution,
                            &p[..k - 1],
                            mat,
                            Provenance {
                                level: k,
                                kind: ProvKind::Deformation {
                                    subset: subset_1b.clone(),
                                    tau: None,
                                },
                            },
                        );
                    }
                    Mode::Closed => {
                        for mask in 0u32..(1 << s) {
                            let tau: Vec<i8> = (0..s)
                                .map(|j| if mask >> j & 1 == 0 { 1 } else { -1 })
                                .collect();
                            if !tau_allowed(&tau, &combo, cfg.sigma.as_deref()) {
                                continue;
                            }
                            let init = closed_family_system(&combo, &tau, n_eff, even_d)?;
                            let out =
                                deform(&target, InitialSystem::Chebyshev(&init), rng, &opts)?;
                            push_resolution(
                                &mut resolutions,
                                out.resolution,
                                &p[..k - 1],
                                mat,
                                Provenance {
                                    level: k,
                                    kind: ProvKind::Deformation {
                                        subset: subset_1b.clone(),
                                        tau: Some(tau),
                                    },
                                },
                            );
                        }
                    }
                    Mode::Single => {
                        let init = single_poly_system(n_eff, even_d)?;
                        let out = deform(&target, InitialSystem::Chebyshev(&init), rng, &opts)?;
                        push_resolution(
                            &mut resolutions,
                            out.resolution,
                            &p[..k - 1],
                            mat,
                            Provenance {
                                level: k,
                                kind: ProvKind::Deformation {
                                    subset: subset_1b.clone(),
                                    tau: Some(vec![1]),
                                },
                            },
                        );
                    }
                }
            }
        }
    }
    // final slice: univariate roots of every polynomial on the last line
    for (i, f) in f_m.iter().enumerate() {
        let sliced = f.substitute_prefix(&p[..n - 1]);
        let dense = densify(&sliced)?;
        let uni = dense.to_univariate().expect("one variable left");
        if uni.degree().map_or(true, |d| d == 0) {
            continue;
        }
        let q = uni.squarefree_part();
        let mut v: Vec<Poly<Rat>> = p[..n - 1]
            .iter()
            .map(|c| Poly::constant(&Rationals, c.clone()))
            .collect();
        v.push(crate::poly::monomial_u());
        let res = GeometricResolution::from_v_form(q, &v);
        push_resolution(
            &mut resolutions,
            res,
            &[],
            mat,
            Provenance {
                level: n,
                kind: ProvKind::Univariate { poly: i + 1 },
            },
        );
    }
    // the base point itself
    push_resolution(
        &mut resolutions,
        GeometricResolution::single_point(p),
        &[],
        mat,
        Provenance {
            level: n,
            kind: ProvKind::BasePoint,
        },
    );
    let warnings = if cfg.mode == Mode::Regular {
        hypothesis_warnings(&resolutions, fs)?
    } else {
        Vec::new()
    };
    Ok(SamplePointSet {
        resolutions,
        matrix: mat.clone(),
        point: p.to_vec(),
        nvars: n,
        warnings,
    })
}

fn push_resolution(
    out: &mut Vec<(GeometricResolution, Provenance)>,
    res: GeometricResolution,
    prefix: &[Rat],
    mat: &ChangeOfVariables,
    prov: Provenance,
) {
    if res.is_empty() {
        return;
    }
    let full = res.with_prefix(prefix);
    let mapped = full.map_linear(&mat.matrix);
    out.push((mapped, prov));
}

fn tau_allowed(tau: &[i8], subset: &[usize], sigma: Option<&[SigmaEntry]>) -> bool {
    let Some(sig) = sigma else { return true };
    tau.iter().zip(subset).all(|(t, &i)| match sig[i] {
        SigmaEntry::Gt => *t > 0,
        SigmaEntry::Lt => *t < 0,
        SigmaEntry::Eq | SigmaEntry::Any => true,
    })
}

/// Best-effort regularity check: at every witness where a subset of the
/// inputs vanishes, the Gram determinant of their gradients must not also
/// vanish. A zero Gram determinant is reported as a warning, never an error.
fn hypothesis_warnings(
    resolutions: &[(GeometricResolution, Provenance)],
    fs: &[Slp],
) -> Result<Vec<String>> {
    use crate::signs::{compose_mod, sign_matrix};
    let mut warnings = Vec::new();
    let grads: Vec<Slp> = fs.iter().map(|f| f.gradient(0)).collect();
    for (ri, (res, _)) in resolutions.iter().enumerate() {
        let matrix = sign_matrix(res, fs)?;
        for (root_i, row) in matrix.signs.iter().enumerate() {
            let vanishing: Vec<usize> = row
                .iter()
                .enumerate()
                .filter(|(_, s)| **s == 0)
                .map(|(i, _)| i)
                .collect();
            if vanishing.is_empty() || vanishing.len() > fs[0].num_inputs {
                continue;
            }
            // Gram determinant of the gradients, composed with the
            // parametrization and reduced mod q
            let ring = crate::quotient::PolyModRing::new_rational(res.q.clone());
            let mut gram: Vec<Vec<Poly<Rat>>> =
                vec![vec![Poly::zero(); vanishing.len()]; vanishing.len()];
            let grad_residues: Vec<Vec<Poly<Rat>>> = vanishing
                .iter()
                .map(|&i| compose_mod(&grads[i], res))
                .collect::<Result<_>>()?;
            for a in 0..vanishing.len() {
                for b in 0..vanishing.len() {
                    let mut acc = Poly::zero();
                    for kk in 0..fs[0].num_inputs {
                        acc = ring.add(&acc, &ring.mul(&grad_residues[a][kk], &grad_residues[b][kk]));
                    }
                    gram[a][b] = acc;
                }
            }
            let det = det_mod(&ring, &gram);
            let s = crate::sturm::sign_at_root(&res.q, &matrix.roots[root_i], &det);
            if s == 0 {
                warnings.push(format!(
                    "regularity heuristic: gradients of {:?} may be dependent at resolution {} root {}",
                    vanishing.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    ri,
                    root_i
                ));
            }
        }
    }
    Ok(warnings)
}

fn det_mod(ring: &crate::quotient::PolyModRing<Rationals>, m: &[Vec<Poly<Rat>>]) -> Poly<Rat> {
    // Leibniz expansion; the Gram blocks here are at most 2x2 or 3x3
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Poly::zero();
    for j in 0..n {
        let minor: Vec<Vec<Poly<Rat>>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let sub = det_mod(ring, &minor);
        let term = ring.mul(&m[0][j], &sub);
        acc = if j % 2 == 0 {
            ring.add(&acc, &term)
        } else {
            ring.sub(&acc, &term)
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signs::{expand_equalities, list_conditions, SignKind};
    use crate::slp::parse;

    fn circle() -> Slp {
        parse("x1^2 + x2^2 - 1", &["x1", "x2"]).unwrap()
    }

    #[test]
    fn seed_reproducibility() {
        let mut r1 = ChaCha8Rng::seed_from_u64(42);
        let mut r2 = ChaCha8Rng::seed_from_u64(42);
        let m1 = random_change_of_variables(&mut r1, 3, 100);
        let m2 = random_change_of_variables(&mut r2, 3, 100);
        assert_eq!(m1.matrix, m2.matrix);
        assert_eq!(random_point(&mut r1, 3, 100), random_point(&mut r2, 3, 100));
        // determinant nonzero by construction
        assert!(!crate::linalg::determinant_qq(&m1.matrix).is_zero());
    }

    #[test]
    fn regular_mode_circle() {
        let cfg = SamplerConfig::new(Mode::Regular, 7);
        let set = run(&[circle()], &[2], &cfg).unwrap();
        // at least: S={1} deformation, the step-4 roots, and p
        assert!(set.resolutions.len() >= 3);
        // the S={1} entry parametrizes points on the circle: check residual
        let defo = set
            .resolutions
            .iter()
            .find(|(_, prov)| matches!(prov.kind, ProvKind::Deformation { .. }))
            .unwrap();
        let r = defo.0.residuals(&circle()).unwrap();
        assert!(r[0].is_zero_poly());
        // strict conditions after expansion cover <, =, >
        let resolutions: Vec<_> = set.resolutions.iter().map(|(r, _)| r.clone()).collect();
        let (conds, _) = list_conditions(&resolutions, &[circle()], SignKind::Strict).unwrap();
        let expanded = expand_equalities(&conds);
        let vecs: Vec<Vec<i8>> = expanded.iter().map(|c| c.signs.clone()).collect();
        assert!(vecs.contains(&vec![-1]) && vecs.contains(&vec![0]) && vecs.contains(&vec![1]));
    }

    #[test]
    fn closed_mode_point_circle() {
        // f = x1^2 + x2^2: the only point of {f <= 0} is the origin; some
        // resolution must contain it
        let f = parse("x1^2 + x2^2", &["x1", "x2"]).unwrap();
        let cfg = SamplerConfig::new(Mode::Closed, 3);
        let set = run(&[f.clone()], &[2], &cfg).unwrap();
        let resolutions: Vec<_> = set.resolutions.iter().map(|(r, _)| r.clone()).collect();
        let (conds, _) = list_conditions(&resolutions, &[f], SignKind::Closed).unwrap();
        let vecs: Vec<Vec<i8>> = conds.iter().map(|c| c.signs.clone()).collect();
        assert!(vecs.contains(&vec![-1]), "origin witnesses f <= 0: {vecs:?}");
        assert!(vecs.contains(&vec![0]) && vecs.contains(&vec![1]));
    }

    #[test]
    fn single_mode_circle() {
        let cfg = SamplerConfig::new(Mode::Single, 5);
        let set = run(&[circle()], &[2], &cfg).unwrap();
        let resolutions: Vec<_> = set.resolutions.iter().map(|(r, _)| r.clone()).collect();
        let (conds, _) = list_conditions(&resolutions, &[circle()], SignKind::Closed).unwrap();
        let vecs: Vec<Vec<i8>> = conds.iter().map(|c| c.signs.clone()).collect();
        // all three closed conditions are feasible and witnessed
        assert_eq!(vecs, vec![vec![-1], vec![0], vec![1]]);
    }

    #[test]
    fn subset_filter_restricts() {
        let f2 = parse("x1 - 3", &["x1", "x2"]).unwrap();
        let mut cfg = SamplerConfig::new(Mode::Regular, 11);
        cfg.sigma = Some(vec![SigmaEntry::Eq, SigmaEntry::Any]);
        let set = run(&[circle(), f2], &[2, 1], &cfg).unwrap();
        for (_, prov) in &set.resolutions {
            if let ProvKind::Deformation { subset, .. } = &prov.kind {
                assert!(subset.contains(&1), "subset {subset:?} must contain f1");
            }
        }
    }

    #[test]
    fn prefix_invariant_internal_coordinates() {
        // level-k resolutions have constant first k-1 coordinates equal to p
        // before the change of variables is applied
        let f = parse("x1^2 + x2^2 + x3^2 - 4", &["x1", "x2", "x3"]).unwrap();
        let mut cfg = SamplerConfig::new(Mode::Regular, 13);
        cfg.coeff_bound = 50; // keep the level-2 systems small
        let set = run(&[f], &[2], &cfg).unwrap();
        let minv = &set.matrix.inverse;
        for (res, prov) in &set.resolutions {
            if prov.level < 2 {
                continue;
            }
            let back = res.map_linear(minv);
            let v = back.v_form().unwrap();
            for j in 0..prov.level - 1 {
                assert_eq!(
                    v[j],
                    Poly::constant(&Rationals, set.point[j].clone()),
                    "prefix coordinate {j} at level {}",
                    prov.level
                );
            }
        }
    }
}
