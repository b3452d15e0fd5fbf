//! The deformation engine.
//!
//! Assembles F_i = (1-t) h_i + t g_i from a target system h and an initial
//! system g with matching degree structure, follows the D solution branches
//! from t = 1 as truncated power series in (t-1), forms the characteristic
//! polynomial of a linear form ℓ(x, y) over the branches to first order in
//! (y - α), reconstructs its t-rational coefficients by Padé approximation,
//! and reads a geometric resolution of a finite superset of the x-projection
//! of the limit fiber at t = 0 off the specialization at t = 0.
//!
//! Two lifting backends share the Newton iteration with a maintained
//! approximate Jacobian inverse (B' = B - B (A_new - A_old) B followed by
//! B_new = 2B' - B' A_new B', both division-free):
//!
//! - pointwise, for grid initial systems: all start points are rational and
//!   every branch is lifted on its own; the first-order (y - α)-expansion of
//!   the characteristic polynomial is assembled as a product of dual-number
//!   linear factors;
//! - parametric, for Chebyshev initial systems: the start points are
//!   algebraic, so each separated block of the fiber is lifted at once as a
//!   geometric resolution with truncated-series coefficients, the label
//!   being renormalised to ℓ_α after every step. The y-derivatives come for
//!   free from the parametrization: ∂P/∂y_k (t, U, α) = -(v_k q' mod q).
//!
//! Values and Jacobians are evaluated by one combined program per step, and
//! the residual invariant of step m (F(lifted) ≡ 0 mod (t-1)^(2^m)) is
//! checked on the low-order part of the following step's evaluation, plus an
//! explicit final check.

use crate::dual::{Dual, DualRing};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::poly::Poly;
use crate::quotient::PolyModRing;
use crate::rational::Rat;
use crate::resolution::GeometricResolution;
use crate::ring::{Rationals, Ring};
use crate::series::{common_denominator, eval_at_t0, pade_reconstruct, SeriesRing, TruncSeries};
use crate::slp::{Slp, SlpBuilder};
use crate::systems::{
    resolve_type2_blocks, BezoutData, ChebyshevInitialSystem, GridInitialSystem, LagrangeSystem,
    ResolvedInitial,
};
use num::{One, Zero};
use rand::Rng;

pub type DS = Dual<TruncSeries>;
type DSRing = DualRing<SeriesRing>;
type QuotSS = PolyModRing<SeriesRing>;

#[derive(Clone, Debug)]
pub struct DeformationProblem {
    /// (t, vars) -> the r deformed equations
    pub f: Slp,
    /// (t, vars) -> [r values, then r x (1+nvars) Jacobian entries row-major]
    pub fsys: Slp,
    /// vars -> the r target equations
    pub target: Slp,
    pub n_x: usize,
    pub nvars: usize,
    /// leading target equations free of μ (checkable on x-parametrizations)
    pub x_only: usize,
    pub bezout: BezoutData,
}

/// Builds F = (1-t) h + t g. The initial system must present the same
/// variable layout and equation count; its degrees must dominate the
/// target's bounds. The specialisations F(1,·) = g and F(0,·) = h are
/// spot-checked at a handful of fixed rational points.
pub fn assemble(
    target: &LagrangeSystem,
    initial_slp: &Slp,
    initial_degrees: &[usize],
    bezout: BezoutData,
) -> Result<DeformationProblem> {
    let nvars = target.slp.num_inputs;
    let r = target.slp.num_outputs();
    if initial_slp.num_inputs != nvars || initial_slp.num_outputs() != r {
        return Err(Error::DegreeMismatch);
    }
    if target
        .degrees
        .iter()
        .zip(initial_degrees)
        .any(|(dt, dg)| dt > dg)
    {
        return Err(Error::DegreeMismatch);
    }
    let mut b = SlpBuilder::new(1 + nvars);
    let t = b.input(0);
    let one = b.constant(Rat::one());
    let one_minus_t = b.sub(one, t);
    let var_nodes: Vec<usize> = (0..nvars).map(|i| b.input(i + 1)).collect();
    let hm = target.slp.import_into(&mut b, Some(&var_nodes));
    let gm = initial_slp.import_into(&mut b, Some(&var_nodes));
    let mut outputs = Vec::with_capacity(r);
    for k in 0..r {
        let ht = b.mul(one_minus_t, hm[target.slp.outputs[k]]);
        let gt = b.mul(t, gm[initial_slp.outputs[k]]);
        outputs.push(b.add(ht, gt));
    }
    let f = b.finish(outputs);
    let fsys = f.with_jacobian();
    let prob = DeformationProblem {
        f,
        fsys,
        target: target.slp.clone(),
        n_x: target.n_x,
        nvars,
        x_only: target.x_only,
        bezout,
    };
    // fixed spot checks: F(0,p) = h(p), F(1,p) = g(p), F(1/2,p) = (h+g)/2
    for j in 0..5i64 {
        let p: Vec<Rat> = (0..nvars)
            .map(|k| crate::rational::ratio((j + 2) * (k as i64 + 1) - 7, j + 3))
            .collect();
        let h_v = target.slp.eval_qq(&p)?;
        let g_v = initial_slp.eval_qq(&p)?;
        let mut at0 = vec![Rat::zero()];
        at0.extend(p.iter().cloned());
        let f0 = prob.f.eval_qq(&at0)?;
        at0[0] = Rat::one();
        let f1 = prob.f.eval_qq(&at0)?;
        at0[0] = crate::rational::ratio(1, 2);
        let fh = prob.f.eval_qq(&at0)?;
        for k in 0..r {
            if f0[k] != h_v[k] || f1[k] != g_v[k] {
                return Err(Error::DegreeMismatch);
            }
            let half = (&h_v[k] + &g_v[k]) / Rat::from(num::BigInt::from(2));
            if fh[k] != half {
                return Err(Error::DegreeMismatch);
            }
        }
    }
    Ok(prob)
}

/// A lifted fiber at a given (t-1)-adic order.
#[derive(Clone, Debug)]
pub enum LiftedFiber {
    /// One coordinate vector of truncated series per branch.
    Pointwise(Vec<Vec<TruncSeries>>),
    /// Resolution data with truncated-series coefficients: the monic minimal
    /// polynomial of ℓ_α over the fiber and its first-order behaviour in
    /// y - α, tangents[k] = ∂P/∂y_k (t, U, α).
    Parametric {
        modulus: Poly<TruncSeries>,
        tangents: Vec<Poly<TruncSeries>>,
    },
}

// ---- pointwise lifting ----

pub struct PointwiseLifter<'a> {
    prob: &'a DeformationProblem,
    pub order: usize,
    pub points: Vec<Vec<TruncSeries>>,
    a_mats: Vec<Matrix<TruncSeries>>,
    b_mats: Vec<Matrix<TruncSeries>>,
    /// order for which the residual invariant is still unchecked
    pending_check: usize,
}

fn pad_matrix(m: &Matrix<TruncSeries>, order: usize) -> Matrix<TruncSeries> {
    m.iter()
        .map(|row| row.iter().map(|e| e.with_order(order)).collect())
        .collect()
}

fn series_low_zero(s: &TruncSeries, upto: usize) -> bool {
    s.low_zero(upto)
}

impl<'a> PointwiseLifter<'a> {
    /// Starts at order 1 from the rational start points; the Jacobian of the
    /// initial system must be nonsingular at each of them.
    pub fn new(prob: &'a DeformationProblem, starts: &[Vec<Rat>]) -> Result<Self> {
        let r = prob.nvars;
        let mut a_mats = Vec::with_capacity(starts.len());
        let mut b_mats = Vec::with_capacity(starts.len());
        let mut points = Vec::with_capacity(starts.len());
        for s in starts {
            // residual at t = 1 must vanish exactly
            let mut inp = vec![Rat::one()];
            inp.extend(s.iter().cloned());
            let flat = prob.fsys.eval_qq(&inp)?;
            if flat[..r].iter().any(|v| !v.is_zero()) {
                return Err(Error::Invalid(
                    "start point is not a solution of the initial system".into(),
                ));
            }
            let a0: Matrix<Rat> = (0..r)
                .map(|i| flat[r + i * (1 + r) + 1..r + (i + 1) * (1 + r)].to_vec())
                .collect();
            let b0 = linalg::invert_matrix(&Rationals, &a0).map_err(|_| Error::SingularJacobian)?;
            let to_series = |m: Matrix<Rat>| -> Matrix<TruncSeries> {
                m.into_iter()
                    .map(|row| row.into_iter().map(|c| TruncSeries::constant(c, 1)).collect())
                    .collect()
            };
            a_mats.push(to_series(a0));
            b_mats.push(to_series(b0));
            points.push(s.iter().map(|c| TruncSeries::constant(c.clone(), 1)).collect());
        }
        Ok(PointwiseLifter {
            prob,
            order: 1,
            points,
            a_mats,
            b_mats,
            pending_check: 0,
        })
    }

    /// One Newton doubling step, capped at `cap`. The residual invariant of
    /// the previous step is verified on the low-order part of this step's
    /// evaluation. On the step that reaches `cap` the Jacobian evaluation
    /// and the inverse update are skipped: v - B F with the previous B is
    /// already accurate there, and no further step needs B.
    pub fn double(&mut self, cap: usize) -> Result<()> {
        let o2 = (2 * self.order).min(cap);
        assert!(o2 > self.order, "already at target order");
        let last_step = o2 >= cap;
        let ring = SeriesRing::new(o2);
        let r = self.prob.nvars;
        let t = TruncSeries::t_series(o2);
        for i in 0..self.points.len() {
            let coords: Vec<TruncSeries> =
                self.points[i].iter().map(|c| c.with_order(o2)).collect();
            let mut inp = vec![t.clone()];
            inp.extend(coords.iter().cloned());
            let flat = self.prob.fsys.eval(&ring, &inp)?;
            let f_val = &flat[..r];
            // residual invariant of the previous step, now at full claimed
            // precision
            if f_val
                .iter()
                .any(|v| !series_low_zero(v, self.pending_check))
            {
                return Err(Error::Invalid(format!(
                    "lifting residual nonzero at order {}",
                    self.pending_check
                )));
            }
            let a_new: Matrix<TruncSeries> = (0..r)
                .map(|row| flat[r + row * (1 + r) + 1..r + (row + 1) * (1 + r)].to_vec())
                .collect();
            let a_old = pad_matrix(&self.a_mats[i], o2);
            let b_old = pad_matrix(&self.b_mats[i], o2);
            // drift correction B' = B - B (A_new - A_old) B makes B accurate
            // at the point where F was just evaluated
            let diff = linalg::mat_sub(&ring, &a_new, &a_old);
            let bdb = linalg::mat_mul(&ring, &b_old, &linalg::mat_mul(&ring, &diff, &b_old));
            let b_prime = linalg::mat_sub(&ring, &b_old, &bdb);
            // the quadratic refinement B_new = 2B' - B' A_new B' is only
            // needed while further steps follow
            let b_new = if last_step {
                b_prime
            } else {
                let bab = linalg::mat_mul(
                    &ring,
                    &b_prime,
                    &linalg::mat_mul(&ring, &a_new, &b_prime),
                );
                let two_bp: Matrix<TruncSeries> = b_prime
                    .iter()
                    .map(|row| row.iter().map(|e| ring.add(e, e)).collect())
                    .collect();
                linalg::mat_sub(&ring, &two_bp, &bab)
            };
            let delta = linalg::mat_vec(&ring, &b_new, f_val);
            self.points[i] = coords
                .iter()
                .zip(&delta)
                .map(|(c, d)| ring.sub(c, d))
                .collect();
            self.a_mats[i] = a_new;
            self.b_mats[i] = b_new;
        }
        self.order = o2;
        self.pending_check = o2;
        Ok(())
    }

    /// Explicit residual check at the current order.
    pub fn check_residual(&self) -> Result<()> {
        let ring = SeriesRing::new(self.order);
        let t = TruncSeries::t_series(self.order);
        for pt in &self.points {
            let mut inp = vec![t.clone()];
            inp.extend(pt.iter().cloned());
            let res = self.prob.f.eval(&ring, &inp)?;
            if res.iter().any(|v| !ring.is_zero(v)) {
                return Err(Error::Invalid(format!(
                    "lifting residual nonzero at order {}",
                    self.order
                )));
            }
        }
        Ok(())
    }
}

/// Lifts the rational start points to the requested (t-1)-adic order and
/// verifies the final residual.
pub fn newton_lift_pointwise(
    prob: &DeformationProblem,
    starts: &[Vec<Rat>],
    order: usize,
) -> Result<LiftedFiber> {
    let mut lifter = PointwiseLifter::new(prob, starts)?;
    while lifter.order < order {
        lifter.double(order)?;
    }
    lifter.check_residual()?;
    Ok(LiftedFiber::Pointwise(lifter.points))
}

// ---- parametric lifting ----

fn pad_ss_poly(p: &Poly<TruncSeries>, ring: &SeriesRing) -> Poly<TruncSeries> {
    p.map(ring, |c| c.with_order(ring.order))
}

fn rat_poly_to_ss(p: &Poly<Rat>, ring: &SeriesRing) -> Poly<TruncSeries> {
    p.map(ring, |c| TruncSeries::constant(c.clone(), ring.order))
}

pub struct ParametricLifter<'a> {
    prob: &'a DeformationProblem,
    pub order: usize,
    alpha: Vec<Rat>,
    /// monic modulus over truncated series, the minimal polynomial of ℓ_α
    pub modulus: Poly<TruncSeries>,
    /// parametrizations of the r coordinates, degree < deg(modulus)
    pub coords: Vec<Poly<TruncSeries>>,
    a_mat: Matrix<Poly<TruncSeries>>,
    b_mat: Matrix<Poly<TruncSeries>>,
    pending_check: usize,
}

impl<'a> ParametricLifter<'a> {
    pub fn new(
        prob: &'a DeformationProblem,
        init: &ResolvedInitial,
        alpha: &[Rat],
    ) -> Result<Self> {
        assert_eq!(alpha.len(), prob.n_x);
        let ring = SeriesRing::new(1);
        let modulus = rat_poly_to_ss(&init.q, &ring);
        let coords: Vec<Poly<TruncSeries>> =
            init.v.iter().map(|v| rat_poly_to_ss(v, &ring)).collect();
        // initial Jacobian inverse over ℚ[U]/(q0); a zero-divisor pivot
        // reports the gcd so the caller can split the fiber
        let q0_ring = PolyModRing::new_rational(init.q.clone());
        let r = prob.nvars;
        let mut inputs: Vec<Poly<Rat>> = vec![Poly::constant(&Rationals, Rat::one())];
        inputs.extend(init.v.iter().cloned());
        let flat = prob.fsys.eval(&q0_ring, &inputs)?;
        if flat[..r].iter().any(|v| !v.is_zero_poly()) {
            return Err(Error::Invalid(
                "initial resolution does not solve the initial system".into(),
            ));
        }
        let a0_rat: Matrix<Poly<Rat>> = (0..r)
            .map(|i| flat[r + i * (1 + r) + 1..r + (i + 1) * (1 + r)].to_vec())
            .collect();
        let b_rat = linalg::invert_matrix(&q0_ring, &a0_rat)?;
        let to_ss = |m: &Matrix<Poly<Rat>>| -> Matrix<Poly<TruncSeries>> {
            m.iter()
                .map(|row| row.iter().map(|e| rat_poly_to_ss(e, &ring)).collect())
                .collect()
        };
        Ok(ParametricLifter {
            prob,
            order: 1,
            alpha: alpha.to_vec(),
            modulus,
            coords,
            a_mat: to_ss(&a0_rat),
            b_mat: to_ss(&b_rat),
            pending_check: 0,
        })
    }

    fn quot_ring(&self, ring: &SeriesRing) -> QuotSS {
        PolyModRing::new(*ring, self.modulus.clone())
    }

    fn t_element(&self, ring: &SeriesRing) -> Poly<TruncSeries> {
        Poly::constant(ring, TruncSeries::t_series(ring.order))
    }

    /// ℓ_α at the current coordinates minus U, the label defect.
    fn label_defect(&self, ring: &SeriesRing, quot: &QuotSS) -> Poly<TruncSeries> {
        let mut acc = quot.zero();
        for (k, a) in self.alpha.iter().enumerate() {
            let scaled = self.coords[k].map(ring, |c| c.scale(a));
            acc = quot.add(&acc, &scaled);
        }
        let u = quot.generator();
        quot.sub(&acc, &u)
    }

    /// Restores ℓ_α(v) ≡ U: q ← q - (Δ q' mod q), v ← (v - Δ v') mod q_new,
    /// exact to the current truncation.
    fn renormalize_label(&mut self, ring: &SeriesRing) {
        let quot = self.quot_ring(ring);
        let delta = self.label_defect(ring, &quot);
        if quot.is_zero(&delta) {
            return;
        }
        let dq = self.modulus.derivative(ring);
        let corr = quot.mul(&delta, &quot.reduce(&dq));
        let q_new = Poly::sub(ring, &self.modulus, &corr);
        debug_assert_eq!(q_new.degree(), self.modulus.degree());
        let new_ring = PolyModRing::new(*ring, q_new.clone());
        self.coords = self
            .coords
            .iter()
            .map(|v| {
                let dv = v.derivative(ring);
                let corr = new_ring.mul(&new_ring.reduce(&delta), &new_ring.reduce(&dv));
                new_ring.sub(&new_ring.reduce(v), &corr)
            })
            .collect();
        self.modulus = q_new;
    }

    /// Explicit residual check at the current order.
    pub fn check_residual(&self) -> Result<()> {
        let ring = SeriesRing::new(self.order);
        let quot = self.quot_ring(&ring);
        let mut inputs = vec![self.t_element(&ring)];
        inputs.extend(self.coords.iter().cloned());
        let res = self.prob.f.eval(&quot, &inputs)?;
        if res.iter().any(|v| !quot.is_zero(v)) {
            return Err(Error::Invalid(format!(
                "parametric lifting residual nonzero at order {}",
                self.order
            )));
        }
        Ok(())
    }

    /// One Newton doubling step with label renormalisation, capped at `cap`.
    /// The step that reaches `cap` skips the Jacobian evaluation and the
    /// inverse update, as no further step will need them.
    pub fn double(&mut self, cap: usize) -> Result<()> {
        let o2 = (2 * self.order).min(cap);
        assert!(o2 > self.order);
        let last_step = o2 >= cap;
        let ring = SeriesRing::new(o2);
        self.modulus = pad_ss_poly(&self.modulus, &ring);
        self.coords = self.coords.iter().map(|c| pad_ss_poly(c, &ring)).collect();
        let pad_mat = |m: &Matrix<Poly<TruncSeries>>| -> Matrix<Poly<TruncSeries>> {
            m.iter()
                .map(|row| row.iter().map(|e| pad_ss_poly(e, &ring)).collect())
                .collect()
        };
        let b_old = pad_mat(&self.b_mat);
        let quot = self.quot_ring(&ring);
        let r = self.prob.nvars;
        let mut inputs = vec![self.t_element(&ring)];
        inputs.extend(self.coords.iter().cloned());
        let flat = self.prob.fsys.eval(&quot, &inputs)?;
        let f_val = &flat[..r];
        // previous step's residual invariant at its full claimed precision
        if f_val
            .iter()
            .any(|v| v.coeffs().iter().any(|c| !series_low_zero(c, self.pending_check)))
        {
            return Err(Error::Invalid(format!(
                "parametric lifting residual nonzero at order {}",
                self.pending_check
            )));
        }
        let a_new: Matrix<Poly<TruncSeries>> = (0..r)
            .map(|i| flat[r + i * (1 + r) + 1..r + (i + 1) * (1 + r)].to_vec())
            .collect();
        let a_old = pad_mat(&self.a_mat);
        // drift correction alone suffices on the step no successor needs
        let diff = linalg::mat_sub(&quot, &a_new, &a_old);
        let bdb = linalg::mat_mul(&quot, &b_old, &linalg::mat_mul(&quot, &diff, &b_old));
        let b_prime = linalg::mat_sub(&quot, &b_old, &bdb);
        let b_new = if last_step {
            b_prime
        } else {
            let bab = linalg::mat_mul(&quot, &b_prime, &linalg::mat_mul(&quot, &a_new, &b_prime));
            let two_bp: Vec<Vec<Poly<TruncSeries>>> = b_prime
                .iter()
                .map(|row| row.iter().map(|e| quot.add(e, e)).collect())
                .collect();
            linalg::mat_sub(&quot, &two_bp, &bab)
        };
        self.a_mat = a_new;
        let delta = linalg::mat_vec(&quot, &b_new, f_val);
        self.coords = self
            .coords
            .iter()
            .zip(&delta)
            .map(|(c, d)| quot.sub(c, d))
            .collect();
        let fiber_degree = self.modulus.degree();
        self.b_mat = b_new;
        self.order = o2;
        self.pending_check = o2;
        self.renormalize_label(&ring);
        // the fiber carries the same number of branches at every order
        debug_assert_eq!(self.modulus.degree(), fiber_degree);
        Ok(())
    }

    /// ∂P_block/∂y_k (t, U, α) = -(v_k q' mod q) for the x-coordinates.
    pub fn tangents(&self) -> Vec<Poly<TruncSeries>> {
        let ring = SeriesRing::new(self.order);
        let quot = self.quot_ring(&ring);
        let dq = quot.reduce(&self.modulus.derivative(&ring));
        (0..self.prob.n_x)
            .map(|k| quot.neg(&quot.mul(&quot.reduce(&self.coords[k]), &dq)))
            .collect()
    }
}

/// Lifts a resolved Chebyshev initial fiber to the requested order and
/// verifies the final residual.
pub fn newton_lift_parametric(
    prob: &DeformationProblem,
    init: &ResolvedInitial,
    alpha: &[Rat],
    order: usize,
) -> Result<LiftedFiber> {
    let mut lifter = ParametricLifter::new(prob, init, alpha)?;
    while lifter.order < order {
        lifter.double(order)?;
    }
    lifter.check_residual()?;
    Ok(LiftedFiber::Parametric {
        tangents: lifter.tangents(),
        modulus: lifter.modulus,
    })
}

// ---- characteristic polynomial and extraction ----

/// Series data of the characteristic polynomial to first order in (y - α):
/// value[h] expands p_h(t, α)/q(t) and tangents[k][h] expands
/// (∂p_h/∂y_k)(t, α)/q(t).
#[derive(Clone, Debug)]
pub struct FiberCharData {
    pub degree: usize,
    pub order: usize,
    pub value: Vec<TruncSeries>,
    pub tangents: Vec<Vec<TruncSeries>>,
}

/// Char data of a lifted fiber. For the pointwise representation the product
/// Π (U - ℓ(S_i, y)) is expanded over dual-number series; the parametric
/// representation already is the (modulus, tangents) pair.
pub fn fiber_char_data(fiber: &LiftedFiber, alpha: &[Rat], n_x: usize, order: usize) -> FiberCharData {
    match fiber {
        LiftedFiber::Parametric { modulus, tangents } => {
            char_data_from_parts(std::slice::from_ref(modulus), std::slice::from_ref(tangents), n_x, order)
        }
        LiftedFiber::Pointwise(points) => {
            let ring = DSRing::new(SeriesRing::new(order), n_x);
            let sring = SeriesRing::new(order);
            let mut acc = Poly::constant(&ring, ring.one());
            for pt in points {
                // label ℓ(S, y) = Σ α_k x_k + Σ ε_k x_k
                let mut label = ring.zero();
                for k in 0..n_x {
                    let x = pt[k].with_order(order);
                    let scaled = x.scale(&alpha[k]);
                    label.val = sring.add(&label.val, &scaled);
                    label.tan[k] = sring.add(&label.tan[k], &x);
                }
                let lin = Poly::new(&ring, vec![ring.neg(&label), ring.one()]);
                acc = Poly::mul(&ring, &acc, &lin);
            }
            let d = acc.degree().expect("monic product");
            let value = (0..=d).map(|h| acc.coeff(&ring, h).val).collect();
            let tangents = (0..n_x)
                .map(|k| (0..=d).map(|h| acc.coeff(&ring, h).tan[k].clone()).collect())
                .collect();
            FiberCharData {
                degree: d,
                order,
                value,
                tangents,
            }
        }
    }
}

/// Combines per-block (modulus, tangents) pairs into the char data of the
/// whole fiber: moduli multiply, tangents follow the product rule.
pub fn char_data_from_parts(
    moduli: &[Poly<TruncSeries>],
    tangents: &[Vec<Poly<TruncSeries>>],
    n_x: usize,
    order: usize,
) -> FiberCharData {
    let ring = SeriesRing::new(order);
    let padded: Vec<Poly<TruncSeries>> =
        moduli.iter().map(|m| pad_ss_poly(m, &ring)).collect();
    let mut product = Poly::constant(&ring, ring.one());
    for m in &padded {
        product = Poly::mul(&ring, &product, m);
    }
    let d = product.degree().expect("monic product");
    let mut tan_polys: Vec<Poly<TruncSeries>> = vec![Poly::zero(); n_x];
    for (b, tans) in tangents.iter().enumerate() {
        // Π of the other moduli
        let mut rest = Poly::constant(&ring, ring.one());
        for (c, m) in padded.iter().enumerate() {
            if c != b {
                rest = Poly::mul(&ring, &rest, m);
            }
        }
        for (k, tk) in tans.iter().enumerate() {
            let term = Poly::mul(&ring, &pad_ss_poly(tk, &ring), &rest);
            tan_polys[k] = Poly::add(&ring, &tan_polys[k], &term);
        }
    }
    let value = (0..=d).map(|h| product.coeff(&ring, h)).collect();
    let tangents = tan_polys
        .into_iter()
        .map(|p| (0..=d).map(|h| p.coeff(&ring, h)).collect())
        .collect();
    FiberCharData {
        degree: d,
        order,
        value,
        tangents,
    }
}

/// The reconstructed numerators of P̂(t, U, α) and its y-derivatives,
/// polynomials in z = t-1 over a common monic denominator q(t).
#[derive(Clone, Debug)]
pub struct CharPolyData {
    /// coefficient of U^h, h = 0..=D
    pub p_hat: Vec<Poly<Rat>>,
    /// [k][h]: coefficient of U^h in ∂P̂/∂y_k
    pub dp_dy: Vec<Vec<Poly<Rat>>>,
    pub q_t: Poly<Rat>,
    pub n_x: usize,
}

/// Reconstructs the t-rational coefficients of the characteristic data to
/// the given degree bound (nD at full precision) and puts them over a common
/// denominator. `hard_bound` is the theoretical nD bound: exceeding it at
/// full precision means the computation is invalid.
pub fn charpoly_reconstruct(
    data: &FiberCharData,
    deg_bound: usize,
    hard_bound: usize,
) -> Result<CharPolyData> {
    let d = data.degree;
    let n_x = data.tangents.len();
    let mut fractions: Vec<(Poly<Rat>, Poly<Rat>)> = Vec::with_capacity((d + 1) * (1 + n_x));
    for h in 0..=d {
        fractions.push(pade_reconstruct(&data.value[h], deg_bound, deg_bound)?);
    }
    for tan in &data.tangents {
        for h in 0..=d {
            fractions.push(pade_reconstruct(&tan[h], deg_bound, deg_bound)?);
        }
    }
    let (nums, q_t) = common_denominator(&fractions);
    if q_t.degree().unwrap_or(0) > hard_bound {
        return Err(Error::DegreeBound {
            got: q_t.degree().unwrap(),
            bound: hard_bound,
        });
    }
    for n in &nums {
        if n.degree().map_or(false, |dg| dg > hard_bound) {
            return Err(Error::DegreeBound {
                got: n.degree().unwrap(),
                bound: hard_bound,
            });
        }
    }
    let p_hat = nums[..=d].to_vec();
    let dp_dy: Vec<Vec<Poly<Rat>>> = (0..n_x)
        .map(|k| nums[(k + 1) * (d + 1)..(k + 2) * (d + 1)].to_vec())
        .collect();
    Ok(CharPolyData {
        p_hat,
        dp_dy,
        q_t,
        n_x,
    })
}

/// Specialises at t = 0 and extracts the geometric resolution
/// {P̂/Q, ∂_U P̂/Q, -∂_{y_k} P̂/Q} with Q = gcd(P̂, ∂_U P̂) at t = 0, all
/// divisions exact and q squarefree; failures signal a non-generic α.
pub fn specialize_and_extract(cp: &CharPolyData) -> Result<GeometricResolution> {
    let qq = Rationals;
    let a = Poly::from_rats(cp.p_hat.iter().map(eval_at_t0).collect());
    if a.is_zero_poly() {
        return Err(Error::BadAlpha);
    }
    if a.degree() == Some(0) {
        // every branch escapes as t -> 0: the limit set is empty
        return Ok(GeometricResolution::empty(cp.n_x));
    }
    let da = a.derivative(&qq);
    let q_gcd = a.gcd(&da);
    let q_raw = a.exact_div(&q_gcd).ok_or(Error::InexactDivision)?;
    let qtilde_raw = da.exact_div(&q_gcd).ok_or(Error::InexactDivision)?;
    if !q_raw.is_squarefree() {
        return Err(Error::BadAlpha);
    }
    let lc = q_raw.leading().unwrap().clone();
    let scale = Poly::constant(&qq, Rat::one() / lc);
    let q_geo = Poly::mul(&qq, &q_raw, &scale);
    let qtilde = Poly::mul(&qq, &qtilde_raw, &scale);
    let mut w = Vec::with_capacity(cp.n_x);
    for k in 0..cp.n_x {
        let b_k = Poly::from_rats(cp.dp_dy[k].iter().map(eval_at_t0).collect());
        let w_raw = Poly::neg(&qq, &b_k)
            .exact_div(&q_gcd)
            .ok_or(Error::BadAlpha)?;
        let w_k = Poly::mul(&qq, &w_raw, &scale);
        w.push(Poly::rem_monic(&qq, &w_k, &q_geo));
    }
    let qtilde = Poly::rem_monic(&qq, &qtilde, &q_geo);
    Ok(GeometricResolution { q: q_geo, qtilde, w })
}

// ---- the deformation driver ----

#[derive(Clone, Copy, Debug)]
pub struct DeformOptions {
    /// try reconstruction at intermediate precisions; failed early results
    /// are always re-verified and redone at full precision
    pub early_exit: bool,
    pub max_alpha_retries: usize,
}

impl Default for DeformOptions {
    fn default() -> Self {
        DeformOptions {
            early_exit: true,
            max_alpha_retries: 5,
        }
    }
}

pub enum InitialSystem<'a> {
    Grid(&'a GridInitialSystem),
    Chebyshev(&'a ChebyshevInitialSystem),
}

pub struct DeformOutcome {
    pub resolution: GeometricResolution,
    pub alpha: Vec<Rat>,
}

fn draw_alpha<R: Rng>(rng: &mut R, n: usize) -> Vec<Rat> {
    (0..n)
        .map(|_| crate::rational::rat(rng.gen_range(1..=65536i64)))
        .collect()
}

/// Checks that the x-only target equations vanish on the parametrized
/// points. The extracted set may strictly contain the x-projection of the
/// limit fiber, but every point of it satisfies those equations; a nonzero
/// residual therefore convicts the reconstruction.
pub fn verify_target_residuals(
    geo: &GeometricResolution,
    prob: &DeformationProblem,
) -> Result<bool> {
    if geo.is_empty() {
        return Ok(true);
    }
    let v = geo.v_form()?;
    let ring = PolyModRing::new_rational(geo.q.clone());
    let mut inputs = v;
    inputs.resize(prob.nvars, Poly::zero());
    let out = prob.target.eval(&ring, &inputs)?;
    Ok(out[..prob.x_only].iter().all(|r| r.is_zero_poly()))
}

fn attempt_extract(
    data: &FiberCharData,
    prob: &DeformationProblem,
    order: usize,
) -> Result<GeometricResolution> {
    let full_bound = prob.n_x * prob.bezout.count;
    let bound = full_bound.min((order - 1) / 2);
    if 2 * bound + 1 > order {
        return Err(Error::NoReconstruction);
    }
    let cp = charpoly_reconstruct(data, bound, full_bound)?;
    let geo = specialize_and_extract(&cp)?;
    if !verify_target_residuals(&geo, prob)? {
        return Err(Error::NoReconstruction);
    }
    Ok(geo)
}

/// Runs one full deformation: assemble, lift, reconstruct, specialise,
/// extract, verify. Retries with fresh α on detected genericity failures.
pub fn deform<R: Rng>(
    target: &LagrangeSystem,
    initial: InitialSystem,
    rng: &mut R,
    opts: &DeformOptions,
) -> Result<DeformOutcome> {
    let (init_slp, init_deg, bezout) = match &initial {
        InitialSystem::Grid(g) => (&g.slp, &g.degrees, g.bezout),
        InitialSystem::Chebyshev(c) => (&c.slp, &c.degrees, c.bezout),
    };
    let prob = assemble(target, init_slp, init_deg, bezout)?;
    let n = prob.bezout.precision;
    match initial {
        InitialSystem::Grid(g) => {
            let starts = g.enumerate_solutions()?;
            let mut lifter = PointwiseLifter::new(&prob, &starts)?;
            let mut alpha = draw_alpha(rng, prob.n_x);
            let mut retries = 0usize;
            loop {
                if lifter.order >= n {
                    lifter.check_residual()?;
                    // full-precision attempt; failures burn an α retry
                    let fiber = LiftedFiber::Pointwise(lifter.points.clone());
                    let data = fiber_char_data(&fiber, &alpha, prob.n_x, lifter.order);
                    match attempt_extract(&data, &prob, lifter.order) {
                        Ok(geo) => return Ok(DeformOutcome { resolution: geo, alpha }),
                        Err(Error::DegreeBound { got, bound }) => {
                            return Err(Error::DegreeBound { got, bound })
                        }
                        Err(_) => {
                            retries += 1;
                            if retries >= opts.max_alpha_retries {
                                return Err(Error::BadAlpha);
                            }
                            alpha = draw_alpha(rng, prob.n_x);
                        }
                    }
                } else {
                    lifter.double(n)?;
                    if opts.early_exit && lifter.order >= 5 && lifter.order < n {
                        let fiber = LiftedFiber::Pointwise(lifter.points.clone());
                        let data = fiber_char_data(&fiber, &alpha, prob.n_x, lifter.order);
                        if let Ok(geo) = attempt_extract(&data, &prob, lifter.order) {
                            return Ok(DeformOutcome { resolution: geo, alpha });
                        }
                    }
                }
            }
        }
        InitialSystem::Chebyshev(c) => {
            let mut retries = 0usize;
            loop {
                let alpha = draw_alpha(rng, prob.n_x);
                match deform_parametric_once(&prob, c, &alpha, opts) {
                    Ok(geo) => {
                        return Ok(DeformOutcome {
                            resolution: geo,
                            alpha,
                        })
                    }
                    Err(Error::DegreeBound { got, bound }) => {
                        return Err(Error::DegreeBound { got, bound })
                    }
                    Err(Error::CountMismatch { expected, found }) => {
                        return Err(Error::CountMismatch { expected, found })
                    }
                    Err(_) => {
                        retries += 1;
                        if retries >= opts.max_alpha_retries {
                            return Err(Error::BadAlpha);
                        }
                    }
                }
            }
        }
    }
}

/// Lifts every separated block of the initial fiber in lockstep, splitting a
/// block whenever a zero-divisor pivot turns up, and reads the
/// characteristic data off the product of the block moduli.
fn deform_parametric_once(
    prob: &DeformationProblem,
    sys: &ChebyshevInitialSystem,
    alpha: &[Rat],
    opts: &DeformOptions,
) -> Result<GeometricResolution> {
    let blocks = resolve_type2_blocks(sys, alpha)?;
    let mut lifters: Vec<ParametricLifter> = Vec::new();
    let mut queue: Vec<ResolvedInitial> = blocks;
    while let Some(part) = queue.pop() {
        match ParametricLifter::new(prob, &part, alpha) {
            Ok(l) => lifters.push(l),
            Err(Error::NotInvertible { gcd }) => split_initial(&part, &gcd, &mut queue)?,
            Err(e) => return Err(e),
        }
    }
    let n = prob.bezout.precision;
    loop {
        for l in lifters.iter_mut() {
            l.double(n)?;
        }
        let order = lifters[0].order;
        let finished = order >= n;
        if finished || (opts.early_exit && order >= 5) {
            if finished {
                for l in &lifters {
                    l.check_residual()?;
                }
            }
            let moduli: Vec<Poly<TruncSeries>> =
                lifters.iter().map(|l| l.modulus.clone()).collect();
            let tangents: Vec<Vec<Poly<TruncSeries>>> =
                lifters.iter().map(|l| l.tangents()).collect();
            let data = char_data_from_parts(&moduli, &tangents, prob.n_x, order);
            match attempt_extract(&data, prob, order) {
                Ok(geo) => return Ok(geo),
                Err(e) if finished => return Err(e),
                Err(_) => {}
            }
        }
    }
}

fn split_initial(
    init: &ResolvedInitial,
    factor: &Poly<Rat>,
    queue: &mut Vec<ResolvedInitial>,
) -> Result<()> {
    let co = init.q.exact_div(factor).ok_or_else(|| {
        Error::CorruptResolution("split factor does not divide the modulus".into())
    })?;
    for f in [factor.clone(), co] {
        if f.degree().map_or(true, |d| d == 0) {
            continue;
        }
        let geo = init.geo.restrict_to_factor(&f);
        let v = geo.v_form()?;
        queue.push(ResolvedInitial {
            q: geo.q.clone(),
            v,
            geo,
        });
    }
    Ok(())
}
