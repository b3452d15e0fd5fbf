//! Critical-point systems and the two families of initial systems for the
//! homotopy deformation.
//!
//! For a subset S of the input polynomials, the extremal points of the first
//! coordinate on {f_S = 0} satisfy a square Lagrange/KKT system. Depending on
//! #S = s and the number of variables n, the system is:
//!
//! - single (s = 1): f, ∂f/∂x_2, ..., ∂f/∂x_n;
//! - mid (2 <= s <= n-1): f_{i_1}, ..., f_{i_s} together with
//!   Σ_j μ_j ∂f_{i_j}/∂x_k for k = 2..n, dehomogenized on the chart μ_s = 1;
//! - square (s >= n): the f_{i_j} alone.
//!
//! Each system is paired with an initial system of identical degree
//! structure whose solutions are known exactly:
//!
//! - grid initial systems have products of shifted coordinates and Cauchy
//!   linear forms; all D solutions are rational and enumerable;
//! - Chebyshev initial systems combine Chebyshev polynomials with a Cauchy
//!   matrix whose prime-controlled denominators keep critical values away
//!   from ±1; the solutions are algebraic with separated univariate
//!   structure and are packaged as a geometric resolution.

use crate::error::{Error, Result};
use crate::linalg::{self};
use crate::poly::{chebyshev_any, Poly};

use crate::rational::{rat, Rat};
use crate::resolution::GeometricResolution;
use crate::ring::Rationals;
use crate::slp::{Slp, SlpBuilder};
use num::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LagrangeCase {
    Single,
    Mid,
    Square,
}

/// Which case a subset size falls into for a given variable count.
pub fn case_for(s: usize, n_x: usize) -> LagrangeCase {
    if s >= n_x {
        LagrangeCase::Square
    } else if s == 1 {
        LagrangeCase::Single
    } else {
        LagrangeCase::Mid
    }
}

/// Number of equations (= number of unknowns) of the system for (s, n).
pub fn system_size(s: usize, n_x: usize) -> usize {
    match case_for(s, n_x) {
        LagrangeCase::Single => n_x,
        LagrangeCase::Mid => s + n_x - 1,
        LagrangeCase::Square => s,
    }
}

#[derive(Clone, Debug)]
pub struct LagrangeSystem {
    /// Inputs (x_1..x_n[, μ_1..μ_{s-1}]); one output per equation.
    pub slp: Slp,
    pub case: LagrangeCase,
    pub s: usize,
    pub n_x: usize,
    /// x-degree bounds per equation.
    pub degrees: Vec<usize>,
    /// The first `x_only` equations do not involve μ.
    pub x_only: usize,
}

/// Builds the critical-point system for the subset (0-based indices into f).
/// `degree_bounds[i]` bounds deg f_i.
pub fn build_lagrange(
    f: &[Slp],
    subset: &[usize],
    degree_bounds: &[usize],
) -> Result<LagrangeSystem> {
    if subset.is_empty() {
        return Err(Error::Invalid("empty subset".into()));
    }
    let n_x = f[subset[0]].num_inputs;
    let s = subset.len();
    let case = case_for(s, n_x);
    let sel_deg: Vec<usize> = subset.iter().map(|&i| degree_bounds[i].max(1)).collect();

    match case {
        LagrangeCase::Square => {
            let mut b = SlpBuilder::new(n_x);
            let mut outputs = Vec::with_capacity(s);
            for &i in subset {
                let mapped = f[i].import_into(&mut b, None);
                outputs.push(mapped[f[i].outputs[0]]);
            }
            Ok(LagrangeSystem {
                slp: b.finish(outputs),
                case,
                s,
                n_x,
                degrees: sel_deg,
                x_only: s,
            })
        }
        LagrangeCase::Single => {
            let fi = &f[subset[0]];
            let grad = fi.gradient(0);
            let mut b = SlpBuilder::new(n_x);
            let fm = fi.import_into(&mut b, None);
            let gm = grad.import_into(&mut b, None);
            let mut outputs = vec![fm[fi.outputs[0]]];
            for k in 1..n_x {
                outputs.push(gm[grad.outputs[k]]);
            }
            let d = sel_deg[0];
            let mut degrees = vec![d];
            degrees.extend(std::iter::repeat(d.saturating_sub(1).max(1)).take(n_x - 1));
            Ok(LagrangeSystem {
                slp: b.finish(outputs),
                case,
                s,
                n_x,
                degrees,
                x_only: n_x,
            })
        }
        LagrangeCase::Mid => {
            // variables (x_1..x_n, μ_1..μ_{s-1}); μ_s is fixed to 1
            let nvars = n_x + s - 1;
            let mut b = SlpBuilder::new(nvars);
            let mut outputs = Vec::new();
            let mut grads = Vec::with_capacity(s);
            for &i in subset {
                let fi = &f[i];
                let x_nodes: Vec<usize> = (0..n_x).map(|k| b.input(k)).collect();
                let fm = fi.import_into(&mut b, Some(&x_nodes));
                outputs.push(fm[fi.outputs[0]]);
                let g = fi.gradient(0);
                let gm = g.import_into(&mut b, Some(&x_nodes));
                grads.push(
                    g.outputs
                        .iter()
                        .map(|&o| gm[o])
                        .collect::<Vec<usize>>(),
                );
            }
            let mu: Vec<usize> = (0..s - 1).map(|j| b.input(n_x + j)).collect();
            for k in 1..n_x {
                // Σ_j μ_j ∂f_{i_j}/∂x_k with μ_s = 1
                let mut acc = grads[s - 1][k];
                for j in 0..s - 1 {
                    let term = b.mul(mu[j], grads[j][k]);
                    acc = b.add(acc, term);
                }
                outputs.push(acc);
            }
            let dmu = sel_deg.iter().copied().max().unwrap().saturating_sub(1).max(1);
            let mut degrees = sel_deg.clone();
            degrees.extend(std::iter::repeat(dmu).take(n_x - 1));
            Ok(LagrangeSystem {
                slp: b.finish(outputs),
                case,
                s,
                n_x,
                degrees,
                x_only: s,
            })
        }
    }
}

/// Bézout count of the bihomogeneous system and the series precision the
/// lifting needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BezoutData {
    pub count: usize,
    /// 2 n D + 1 with n the number of x-variables.
    pub precision: usize,
    pub n_x: usize,
}

/// Multihomogeneous Bézout count: in the mid case
/// D = (Π_{i<=s} d_i) · Σ_{E ⊂ μ-equations, #E = n-s} Π_{j∈E} d_j;
/// in the single and square cases D = Π d_i.
pub fn bezout_count(s: usize, n_x: usize, degrees: &[usize]) -> BezoutData {
    let count = match case_for(s, n_x) {
        LagrangeCase::Mid => {
            let r = s + n_x - 1;
            assert_eq!(degrees.len(), r);
            let head: usize = degrees[..s].iter().product();
            let tail = &degrees[s..];
            let mut sum = 0usize;
            for combo in combinations(tail.len(), n_x - s) {
                sum += combo.iter().map(|&j| tail[j]).product::<usize>();
            }
            head * sum
        }
        _ => degrees.iter().product(),
    };
    BezoutData {
        count,
        precision: 2 * n_x * count + 1,
        n_x,
    }
}

/// All k-subsets of {0..n-1} in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

// ---- grid initial systems ----

/// Initial system whose solutions form a rational grid combined with
/// invertible Cauchy linear systems; mirrors the degree structure of the
/// Lagrange system it deforms.
#[derive(Clone, Debug)]
pub struct GridInitialSystem {
    pub s: usize,
    pub n_x: usize,
    pub case: LagrangeCase,
    pub degrees: Vec<usize>,
    /// max over the degree vector; spaces the Cauchy offsets apart
    pub dmax: usize,
    pub slp: Slp,
    pub bezout: BezoutData,
}

fn phi_coeff(i: usize, j: usize, k: usize, s: usize, dmax: usize) -> Rat {
    // linear-form coefficient of x_k in the j-th factor of equation i
    // (all 1-based; s+1 <= i, 1 <= j <= d_i, s+1 <= k <= n+1 with n+1 the
    // constant slot)
    let den = (i - s - 1) * dmax + (j - 1) + (k - s);
    Rat::new(num::BigInt::one(), num::BigInt::from(den))
}

fn psi_coeff(i: usize, k: usize, s: usize) -> Rat {
    // μ_k coefficient of equation i (1-based, 1 <= k <= s)
    Rat::new(num::BigInt::one(), num::BigInt::from(i - s - 1 + k))
}

/// Builds the grid initial system matching (s, n, degree vector).
pub fn build_type1(s: usize, n_x: usize, degrees: &[usize]) -> Result<GridInitialSystem> {
    let case = case_for(s, n_x);
    let r = system_size(s, n_x);
    if degrees.len() != r {
        return Err(Error::Invalid(format!(
            "expected {r} degrees for s={s}, n={n_x}, got {}",
            degrees.len()
        )));
    }
    if degrees.iter().any(|&d| d == 0) {
        return Err(Error::Invalid("degree bounds must be >= 1".into()));
    }
    let dmax = degrees.iter().copied().max().unwrap();
    let nvars = if case == LagrangeCase::Mid {
        n_x + s - 1
    } else {
        n_x
    };
    let mut b = SlpBuilder::new(nvars);
    let grid_eqs = match case {
        LagrangeCase::Mid => s,
        LagrangeCase::Single | LagrangeCase::Square => r,
    };
    let mut outputs = Vec::with_capacity(r);
    for i in 0..grid_eqs {
        let xi = b.input(i);
        let mut prod: Option<usize> = None;
        for j in 1..=degrees[i] {
            let c = b.constant(rat(j as i64));
            let lin = b.sub(xi, c);
            prod = Some(match prod {
                None => lin,
                Some(p) => b.mul(p, lin),
            });
        }
        outputs.push(prod.unwrap());
    }
    if case == LagrangeCase::Mid {
        let x_nodes: Vec<usize> = (s..n_x).map(|k| b.input(k)).collect();
        let mu_nodes: Vec<usize> = (0..s - 1).map(|j| b.input(n_x + j)).collect();
        for i in (s + 1)..=(s + n_x - 1) {
            // product of the d_i linear forms in x_{s+1..n}
            let mut prod: Option<usize> = None;
            for j in 1..=degrees[i - 1] {
                let mut acc: Option<usize> = None;
                for k in (s + 1)..=n_x {
                    let c = b.constant(phi_coeff(i, j, k, s, dmax));
                    let t = b.mul(c, x_nodes[k - s - 1]);
                    acc = Some(match acc {
                        None => t,
                        Some(a) => b.add(a, t),
                    });
                }
                let cst = b.constant(phi_coeff(i, j, n_x + 1, s, dmax));
                let form = b.add(acc.unwrap(), cst);
                prod = Some(match prod {
                    None => form,
                    Some(p) => b.mul(p, form),
                });
            }
            // μ linear form on the chart μ_s = 1
            let mut acc = b.constant(psi_coeff(i, s, s));
            for k in 1..s {
                let c = b.constant(psi_coeff(i, k, s));
                let t = b.mul(c, mu_nodes[k - 1]);
                acc = b.add(acc, t);
            }
            outputs.push(b.mul(prod.unwrap(), acc));
        }
    }
    let bez = bezout_count(s, n_x, degrees);
    Ok(GridInitialSystem {
        s,
        n_x,
        case,
        degrees: degrees.to_vec(),
        dmax,
        slp: b.finish(outputs),
        bezout: bez,
    })
}

impl GridInitialSystem {
    /// Enumerates all D solutions (on the chart μ_s = 1 in the mid case).
    /// Checks the count, pairwise-distinct x-projections and nonsingular
    /// Jacobians; any failure indicates a coefficient bug.
    pub fn enumerate_solutions(&self) -> Result<Vec<Vec<Rat>>> {
        let mut pts = match self.case {
            LagrangeCase::Single | LagrangeCase::Square => grid_points(&self.degrees),
            LagrangeCase::Mid => self.enumerate_mid()?,
        };
        if pts.len() != self.bezout.count {
            return Err(Error::CountMismatch {
                expected: self.bezout.count,
                found: pts.len(),
            });
        }
        // distinct x-projections
        pts.sort_by(|a, b| {
            for (x, y) in a[..self.n_x].iter().zip(&b[..self.n_x]) {
                match x.cmp(y) {
                    std::cmp::Ordering::Equal => continue,
                    o => return o,
                }
            }
            std::cmp::Ordering::Equal
        });
        for w in pts.windows(2) {
            if w[0][..self.n_x] == w[1][..self.n_x] {
                return Err(Error::CountMismatch {
                    expected: self.bezout.count,
                    found: pts.len() - 1,
                });
            }
        }
        // nonsingular Jacobian at every start point
        let jac = self.slp.jacobian();
        let r = self.slp.num_outputs();
        for p in &pts {
            let flat = jac.eval_qq(p)?;
            let m: Vec<Vec<Rat>> = (0..r).map(|i| flat[i * p.len()..(i + 1) * p.len()].to_vec()).collect();
            if linalg::determinant_qq(&m).is_zero() {
                return Err(Error::SingularJacobian);
            }
        }
        Ok(pts)
    }

    fn enumerate_mid(&self) -> Result<Vec<Vec<Rat>>> {
        let (s, n) = (self.s, self.n_x);
        let r = s + n - 1;
        let mut out = Vec::with_capacity(self.bezout.count);
        let head = grid_points(&self.degrees[..s]);
        // equations s+1..r, 0-based offsets into the tail
        let tail_eqs: Vec<usize> = ((s + 1)..=r).collect();
        for combo in combinations(tail_eqs.len(), n - s) {
            let in_e: Vec<usize> = combo.iter().map(|&c| tail_eqs[c]).collect();
            let rest: Vec<usize> = tail_eqs
                .iter()
                .copied()
                .filter(|i| !in_e.contains(i))
                .collect();
            // μ-part: ψ̄_i(μ) = 0 for i in rest; depends only on the subset
            let mu = if s > 1 {
                let mat: Vec<Vec<Rat>> = rest
                    .iter()
                    .map(|&i| (1..s).map(|k| psi_coeff(i, k, s)).collect())
                    .collect();
                let rhs: Vec<Rat> = rest.iter().map(|&i| -psi_coeff(i, s, s)).collect();
                linalg::solve(&Rationals, &mat, &rhs)?
            } else {
                vec![]
            };
            // factor choices per equation of E
            for choice in grid_points(&in_e.iter().map(|&i| self.degrees[i - 1]).collect::<Vec<_>>())
            {
                // x_{s+1..n} from the chosen vanishing linear forms
                let mat: Vec<Vec<Rat>> = in_e
                    .iter()
                    .zip(&choice)
                    .map(|(&i, j)| {
                        let j = rat_to_usize(j);
                        ((s + 1)..=n).map(|k| phi_coeff(i, j, k, s, self.dmax)).collect()
                    })
                    .collect();
                let rhs: Vec<Rat> = in_e
                    .iter()
                    .zip(&choice)
                    .map(|(&i, j)| -phi_coeff(i, rat_to_usize(j), n + 1, s, self.dmax))
                    .collect();
                let x_tail = linalg::solve(&Rationals, &mat, &rhs)?;
                for g in &head {
                    let mut pt = g.clone();
                    pt.extend(x_tail.iter().cloned());
                    pt.extend(mu.iter().cloned());
                    out.push(pt);
                }
            }
        }
        Ok(out)
    }
}

fn rat_to_usize(x: &Rat) -> usize {
    use num::ToPrimitive;
    x.to_integer().to_usize().expect("small positive integer")
}

/// Cartesian grid {1..d_1} × ... × {1..d_k} in lexicographic order.
fn grid_points(degrees: &[usize]) -> Vec<Vec<Rat>> {
    let mut out = vec![vec![]];
    for &d in degrees {
        let mut next = Vec::with_capacity(out.len() * d);
        for p in &out {
            for j in 1..=d {
                let mut q = p.clone();
                q.push(rat(j as i64));
                next.push(q);
            }
        }
        out = next;
    }
    out
}

// ---- Chebyshev initial systems ----

/// Initial system built from the Chebyshev polynomial T of even degree d and
/// a Cauchy matrix A_{ik} = 1/(a_i + k) whose last offset satisfies
/// a_s + n + 1 prime. The x-equations are τ_i (n + A_{i,n+1} + Σ_k A_{ik}
/// T(x_k)); the μ-equations factor as T'(x_k) times a linear form in μ.
#[derive(Clone, Debug)]
pub struct ChebyshevInitialSystem {
    pub s: usize,
    pub n_x: usize,
    pub d: usize,
    /// +1 or -1 per x-equation
    pub tau: Vec<i8>,
    pub offsets: Vec<u64>,
    pub case: LagrangeCase,
    pub degrees: Vec<usize>,
    pub slp: Slp,
    pub bezout: BezoutData,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// First `count` primes strictly greater than n.
pub fn primes_greater(n: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = n + 1;
    while out.len() < count {
        if is_prime(c) {
            out.push(c);
        }
        c += 1;
    }
    out
}

fn cauchy_entry(offsets: &[u64], i: usize, k: usize) -> Rat {
    // A_{ik} = 1/(a_i + k), i 0-based, k 1-based
    Rat::new(num::BigInt::one(), num::BigInt::from(offsets[i] + k as u64))
}

/// Horner chain for a dense univariate polynomial applied to a node.
fn poly_at_node(b: &mut SlpBuilder, p: &Poly<Rat>, x: usize) -> usize {
    let coeffs = p.coeffs();
    if coeffs.is_empty() {
        return b.constant(Rat::zero());
    }
    let mut acc = b.constant(coeffs.last().unwrap().clone());
    for c in coeffs.iter().rev().skip(1) {
        let t = b.mul(acc, x);
        let cc = b.constant(c.clone());
        acc = b.add(t, cc);
    }
    acc
}

/// Builds the Chebyshev initial system for the given shape. `d` must be even
/// and >= 2; offsets must be strictly increasing with a_s + n + 1 prime.
pub fn build_type2(
    s: usize,
    n_x: usize,
    d: usize,
    tau: &[i8],
    offsets: &[u64],
) -> Result<ChebyshevInitialSystem> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::Invalid("Chebyshev degree must be even >= 2".into()));
    }
    if tau.len() != s || offsets.len() != s {
        return Err(Error::Invalid("tau/offsets must have length s".into()));
    }
    if offsets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("offsets must be strictly increasing".into()));
    }
    if !is_prime(offsets[s - 1] + n_x as u64 + 1) {
        return Err(Error::Invalid(format!(
            "a_s + n + 1 = {} is not prime",
            offsets[s - 1] + n_x as u64 + 1
        )));
    }
    let case = case_for(s, n_x);
    let r = system_size(s, n_x);
    let t_poly = chebyshev_any(d);
    let tp_poly = t_poly.derivative(&Rationals);

    let nvars = if case == LagrangeCase::Mid {
        n_x + s - 1
    } else {
        n_x
    };
    let mut b = SlpBuilder::new(nvars);
    let x_nodes: Vec<usize> = (0..n_x).map(|k| b.input(k)).collect();
    let t_at: Vec<usize> = x_nodes
        .iter()
        .map(|&x| poly_at_node(&mut b, &t_poly, x))
        .collect();
    let mut outputs = Vec::with_capacity(r);
    for i in 0..s {
        // τ_i (n + A_{i,n+1} + Σ_k A_{ik} T(x_k))
        let mut acc = b.constant(
            rat(n_x as i64) + cauchy_entry(offsets, i, n_x + 1),
        );
        for k in 1..=n_x {
            let c = b.constant(cauchy_entry(offsets, i, k));
            let term = b.mul(c, t_at[k - 1]);
            acc = b.add(acc, term);
        }
        outputs.push(if tau[i] < 0 { b.neg(acc) } else { acc });
    }
    match case {
        LagrangeCase::Square => {}
        LagrangeCase::Single => {
            // ∂g_1/∂x_k = τ_1 A_{1k} T'(x_k), k = 2..n
            for k in 2..=n_x {
                let tp = poly_at_node(&mut b, &tp_poly, x_nodes[k - 1]);
                let mut c = cauchy_entry(offsets, 0, k);
                if tau[0] < 0 {
                    c = -c;
                }
                let cc = b.constant(c);
                outputs.push(b.mul(cc, tp));
            }
        }
        LagrangeCase::Mid => {
            // T'(x_k) (Σ_j τ_j A_{jk} μ_j) with μ_s = 1, k = 2..n
            let mu_nodes: Vec<usize> = (0..s - 1).map(|j| b.input(n_x + j)).collect();
            for k in 2..=n_x {
                let tp = poly_at_node(&mut b, &tp_poly, x_nodes[k - 1]);
                let mut c_last = cauchy_entry(offsets, s - 1, k);
                if tau[s - 1] < 0 {
                    c_last = -c_last;
                }
                let mut acc = b.constant(c_last);
                for j in 0..s - 1 {
                    let mut c = cauchy_entry(offsets, j, k);
                    if tau[j] < 0 {
                        c = -c;
                    }
                    let cc = b.constant(c);
                    let term = b.mul(cc, mu_nodes[j]);
                    acc = b.add(acc, term);
                }
                outputs.push(b.mul(tp, acc));
            }
        }
    }
    let mut degrees = vec![d; s];
    degrees.extend(std::iter::repeat(d - 1).take(r - s));
    let bezout = bezout_count(s, n_x, &degrees);
    // closed form sanity: C(n-1, s-1) d^s (d-1)^(n-s) in the deformable cases
    if s <= n_x {
        let closed = binomial(n_x - 1, s - 1)
            * d.pow(s as u32)
            * (d - 1).pow((n_x - s) as u32);
        debug_assert_eq!(bezout.count, closed);
    }
    Ok(ChebyshevInitialSystem {
        s,
        n_x,
        d,
        tau: tau.to_vec(),
        offsets: offsets.to_vec(),
        case,
        degrees,
        slp: b.finish(outputs),
        bezout,
    })
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// The per-polynomial positive initial equations of the closed-condition
/// driver: g_i uses the i-th prime greater than n as its Cauchy anchor, so
/// any subset with any sign pattern is a valid Chebyshev initial system.
pub fn closed_family_system(
    subset: &[usize],
    tau: &[i8],
    n_x: usize,
    d: usize,
) -> Result<ChebyshevInitialSystem> {
    let m = subset.iter().copied().max().unwrap() + 1;
    let primes = primes_greater(n_x as u64, m);
    let offsets: Vec<u64> = subset
        .iter()
        .map(|&i| primes[i] - n_x as u64 - 1)
        .collect();
    build_type2(subset.len(), n_x, d, tau, &offsets)
}

/// Initial system of the single-polynomial driver: s = 1, positive sign,
/// anchored at the smallest prime greater than n.
pub fn single_poly_system(n_x: usize, d: usize) -> Result<ChebyshevInitialSystem> {
    let q = primes_greater(n_x as u64, 1)[0];
    build_type2(1, n_x, d, &[1], &[q - n_x as u64 - 1])
}

// ---- exact resolution of a Chebyshev initial system ----

/// Product algebra ℚ[x_1]/(u_1) ⊗ ... ⊗ ℚ[x_w]/(u_w) with monic squarefree
/// factors, used to resolve one separated-variable block by linear algebra.
struct ProductAlgebra {
    factors: Vec<Poly<Rat>>,
    dims: Vec<usize>,
    dim: usize,
}

impl ProductAlgebra {
    fn new(factors: Vec<Poly<Rat>>) -> Self {
        let dims: Vec<usize> = factors.iter().map(|u| u.degree().unwrap()).collect();
        let dim = dims.iter().product();
        ProductAlgebra { factors, dims, dim }
    }

    /// Multiplication by the coordinate `which` on the monomial basis: the
    /// companion action of its factor along that axis.
    fn mul_by_coord(&self, which: usize, v: &[Rat]) -> Vec<Rat> {
        let m = self.dims[which];
        let stride: usize = self.dims[..which].iter().product();
        let u = &self.factors[which];
        let mut out = vec![Rat::zero(); self.dim];
        for base in 0..self.dim / (stride * m) {
            for low in 0..stride {
                let start = base * stride * m + low;
                // top coefficient along the axis feeds back through -u
                let top = &v[start + (m - 1) * stride];
                for e in 0..m {
                    let idx = start + e * stride;
                    let mut val = if e == 0 {
                        Rat::zero()
                    } else {
                        v[start + (e - 1) * stride].clone()
                    };
                    if !top.is_zero() {
                        val -= top * &u.coeffs()[e];
                    }
                    out[idx] = val;
                }
            }
        }
        out
    }

    fn mul_by_linform(&self, alpha: &[Rat], v: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim];
        for (k, a) in alpha.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let xv = self.mul_by_coord(k, v);
            for (o, x) in out.iter_mut().zip(xv) {
                *o += a * x;
            }
        }
        out
    }
}

/// The resolved initial variety: v-form parametrization together with the
/// (q, q', w) resolution, all coordinates (x then μ) on the chart μ_s = 1.
#[derive(Clone, Debug)]
pub struct ResolvedInitial {
    pub q: Poly<Rat>,
    pub v: Vec<Poly<Rat>>,
    pub geo: GeometricResolution,
}

/// Resolves each separated-variable block of a Chebyshev initial system
/// into its own geometric resolution, associated with the linear form
/// ℓ_α(x). Per block the variety is a product of univariate constraints
/// (Chebyshev critical points on the block coordinates, fibers T(x) = c with
/// the Cramer values c off ±1 elsewhere), resolved by Krylov linear algebra
/// in the product algebra. The block minimal polynomials are pairwise
/// coprime and their degrees sum to D; any failure of that is a non-generic
/// α or a coefficient bug.
pub fn resolve_type2_blocks(
    sys: &ChebyshevInitialSystem,
    alpha: &[Rat],
) -> Result<Vec<ResolvedInitial>> {
    let (s, n, d) = (sys.s, sys.n_x, sys.d);
    if case_for(s, n) == LagrangeCase::Square && s > n {
        return Err(Error::Invalid("cannot resolve an overdetermined system".into()));
    }
    let qq = Rationals;
    let t_poly = chebyshev_any(d);
    let tp_poly = t_poly.derivative(&qq);
    let t_half = chebyshev_any(d / 2);
    // critical points split by critical value: T' = c · gcd(T',T+1) gcd(T',T-1)
    let u_minus = t_half.monic();
    let u_plus = tp_poly
        .exact_div(&t_half)
        .expect("T_{d/2} divides T_d'")
        .monic();
    debug_assert_eq!(tp_poly.gcd(&Poly::add(&qq, &t_poly, &crate::poly::qpoly(&[1]))), u_minus);

    let nvars = sys.slp.num_inputs;
    let mut blocks: Vec<ResolvedInitial> = Vec::new();
    let mut total_dim = 0usize;

    // B runs over (n-s)-subsets of the coordinates x_2..x_n
    let b_space: Vec<usize> = (2..=n).collect();
    for combo in combinations(b_space.len(), n - s) {
        let b_set: Vec<usize> = combo.iter().map(|&c| b_space[c]).collect();
        let rest: Vec<usize> = (1..=n).filter(|k| !b_set.contains(k)).collect();
        debug_assert_eq!(rest.len(), s);
        // μ-part per block: Cauchy solve on the equations whose T' factor
        // does not vanish; independent of the sign assignment e
        let mu = if sys.case == LagrangeCase::Mid {
            let ks: Vec<usize> = (2..=n).filter(|k| !b_set.contains(k)).collect();
            debug_assert_eq!(ks.len(), s - 1);
            let mat: Vec<Vec<Rat>> = ks
                .iter()
                .map(|&k| {
                    (0..s - 1)
                        .map(|j| {
                            let mut c = cauchy_entry(&sys.offsets, j, k);
                            if sys.tau[j] < 0 {
                                c = -c;
                            }
                            c
                        })
                        .collect()
                })
                .collect();
            let rhs: Vec<Rat> = ks
                .iter()
                .map(|&k| {
                    let mut c = cauchy_entry(&sys.offsets, s - 1, k);
                    if sys.tau[s - 1] < 0 {
                        c = -c;
                    }
                    -c
                })
                .collect();
            linalg::solve(&qq, &mat, &rhs)?
        } else {
            vec![]
        };
        // sign assignments e : B -> {±1}
        for mask in 0..(1u32 << b_set.len()) {
            let e: Vec<i8> = (0..b_set.len())
                .map(|i| if mask >> i & 1 == 1 { 1 } else { -1 })
                .collect();
            // skip empty branches (u_plus can be constant when d = 2)
            if e.iter().any(|&ek| ek > 0) && u_plus.degree() == Some(0) {
                continue;
            }
            // Cramer system for T(x_k), k outside B
            let mat: Vec<Vec<Rat>> = (0..s)
                .map(|i| rest.iter().map(|&k| cauchy_entry(&sys.offsets, i, k)).collect())
                .collect();
            let rhs: Vec<Rat> = (0..s)
                .map(|i| {
                    let mut acc = rat(n as i64) + cauchy_entry(&sys.offsets, i, n + 1);
                    for (bk, ek) in b_set.iter().zip(&e) {
                        let v = cauchy_entry(&sys.offsets, i, *bk);
                        acc += if *ek > 0 { v } else { -v };
                    }
                    -acc
                })
                .collect();
            let c_vals = linalg::solve(&qq, &mat, &rhs)?;
            // the prime denominators keep every Cramer value off ±1, which
            // guarantees d simple fiber points per free coordinate
            for c in &c_vals {
                assert!(
                    c.abs() != Rat::one(),
                    "Cramer value hit ±1; initial system coefficients are wrong"
                );
            }
            // per-coordinate univariate constraints
            let mut factors: Vec<Poly<Rat>> = Vec::with_capacity(n);
            for k in 1..=n {
                if let Some(pos) = b_set.iter().position(|&bk| bk == k) {
                    factors.push(if e[pos] > 0 { u_plus.clone() } else { u_minus.clone() });
                } else {
                    let pos = rest.iter().position(|&rk| rk == k).unwrap();
                    let shifted = Poly::sub(&qq, &t_poly, &Poly::constant(&qq, c_vals[pos].clone()));
                    factors.push(shifted.monic());
                }
            }
            let algebra = ProductAlgebra::new(factors);
            if algebra.dim == 0 {
                continue;
            }
            total_dim += algebra.dim;
            let geo = resolve_block(&algebra, &alpha[..n], &mu, nvars, n)?;
            let v = geo.v_form()?;
            blocks.push(ResolvedInitial {
                q: geo.q.clone(),
                v,
                geo,
            });
        }
    }
    if total_dim != sys.bezout.count {
        return Err(Error::CountMismatch {
            expected: sys.bezout.count,
            found: total_dim,
        });
    }
    // distinct blocks must carry disjoint labels
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if blocks[i].q.gcd(&blocks[j].q).degree() != Some(0) {
                return Err(Error::BadAlpha);
            }
        }
    }
    Ok(blocks)
}

/// Geometric resolution of all D solutions of a Chebyshev initial system:
/// the pairwise-coprime union of the block resolutions.
pub fn resolve_type2(sys: &ChebyshevInitialSystem, alpha: &[Rat]) -> Result<ResolvedInitial> {
    let blocks = resolve_type2_blocks(sys, alpha)?;
    let mut total: Option<GeometricResolution> = None;
    for b in blocks {
        total = Some(match total {
            None => b.geo,
            Some(t) => t.merge_coprime(&b.geo)?,
        });
    }
    let geo = total.expect("at least one block");
    if !geo.q.is_squarefree() {
        return Err(Error::BadAlpha);
    }
    let v = geo.v_form()?;
    Ok(ResolvedInitial {
        q: geo.q.clone(),
        v,
        geo,
    })
}

/// Krylov resolution of one separated block: the minimal polynomial of ℓ_α
/// acting on 1, and the coordinates expressed in the Krylov basis.
fn resolve_block(
    algebra: &ProductAlgebra,
    alpha: &[Rat],
    mu: &[Rat],
    nvars: usize,
    n_x: usize,
) -> Result<GeometricResolution> {
    let dim = algebra.dim;
    let mut vecs: Vec<Vec<Rat>> = Vec::with_capacity(dim + 1);
    let mut one = vec![Rat::zero(); dim];
    one[0] = Rat::one();
    vecs.push(one);
    for i in 0..dim {
        let next = algebra.mul_by_linform(alpha, &vecs[i]);
        vecs.push(next);
    }
    // columns K = [1, ℓ, ..., ℓ^{dim-1}]; invertible iff ℓ_α separates
    let k_mat: Vec<Vec<Rat>> = (0..dim)
        .map(|row| (0..dim).map(|col| vecs[col][row].clone()).collect())
        .collect();
    let k_inv = match linalg::invert_matrix(&Rationals, &k_mat) {
        Ok(inv) => inv,
        Err(_) => return Err(Error::BadAlpha),
    };
    // minimal polynomial: ℓ^dim = Σ c_i ℓ^i
    let last: Vec<Rat> = (0..dim).map(|row| vecs[dim][row].clone()).collect();
    let c = linalg::mat_vec(&Rationals, &k_inv, &last);
    let mut q_coeffs: Vec<Rat> = c.iter().map(|x| -x).collect();
    q_coeffs.push(Rat::one());
    let q = Poly::from_rats(q_coeffs);
    if !q.is_squarefree() {
        return Err(Error::BadAlpha);
    }
    // coordinates in the Krylov basis: v_k(ℓ) = x_k
    let mut v = Vec::with_capacity(nvars);
    for k in 0..n_x {
        let mut basis = vec![Rat::zero(); dim];
        basis[0] = Rat::one();
        let xk = algebra.mul_by_coord(k, &basis);
        let coeffs = linalg::mat_vec(&Rationals, &k_inv, &xk);
        v.push(Poly::from_rats(coeffs));
    }
    for m in mu {
        v.push(Poly::constant(&Rationals, m.clone()));
    }
    debug_assert_eq!(v.len(), nvars);
    Ok(GeometricResolution::from_v_form(q, &v))
}
