//! Exact dense linear algebra over ring contexts.
//!
//! Plain Gaussian elimination throughout: the systems here are desk-sized
//! (Cauchy systems of the initial varieties, Jacobian inverses), so no
//! structured fast solvers are used. Over quotient rings the pivot search
//! reports a gcd obstruction so the caller can split the modulus.

use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::ring::{FieldLike, InvertError, Rationals, Ring};

pub type Matrix<T> = Vec<Vec<T>>;

pub fn mat_mul<R: Ring>(ring: &R, a: &Matrix<R::El>, b: &Matrix<R::El>) -> Matrix<R::El> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![ring.zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if ring.is_zero(&a[i][l]) {
                continue;
            }
            for j in 0..m {
                out[i][j] = ring.add(&out[i][j], &ring.mul(&a[i][l], &b[l][j]));
            }
        }
    }
    out
}

pub fn mat_vec<R: Ring>(ring: &R, a: &Matrix<R::El>, v: &[R::El]) -> Vec<R::El> {
    a.iter().map(|row| ring.dot(row, v)).collect()
}

pub fn mat_sub<R: Ring>(ring: &R, a: &Matrix<R::El>, b: &Matrix<R::El>) -> Matrix<R::El> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| ring.sub(x, y)).collect())
        .collect()
}

pub fn identity<R: Ring>(ring: &R, n: usize) -> Matrix<R::El> {
    let mut out = vec![vec![ring.zero(); n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = ring.one();
    }
    out
}

/// Gauss-Jordan inverse over a field-like ring. The pivot search prefers an
/// invertible entry; if a column offers none, the first zero-divisor witness
/// is reported (NotInvertible with a factor over quotient rings,
/// SingularMatrix over ℚ).
pub fn invert_matrix<R: FieldLike>(ring: &R, a: &Matrix<R::El>) -> Result<Matrix<R::El>> {
    let n = a.len();
    let mut m: Matrix<R::El> = a.clone();
    let mut inv = identity(ring, n);
    for col in 0..n {
        let mut pivot: Option<(usize, R::El)> = None;
        let mut obstruction: Option<Error> = None;
        for row in col..n {
            if ring.is_zero(&m[row][col]) {
                continue;
            }
            match ring.invert(&m[row][col]) {
                Ok(piv_inv) => {
                    pivot = Some((row, piv_inv));
                    break;
                }
                Err(InvertError::ZeroDivisor(g)) => {
                    obstruction.get_or_insert(Error::NotInvertible { gcd: g });
                }
                Err(InvertError::Zero) => {}
            }
        }
        let (prow, piv_inv) = match pivot {
            Some(p) => p,
            None => return Err(obstruction.unwrap_or(Error::SingularMatrix)),
        };
        m.swap(col, prow);
        inv.swap(col, prow);
        for j in 0..n {
            m[col][j] = ring.mul(&m[col][j], &piv_inv);
            inv[col][j] = ring.mul(&inv[col][j], &piv_inv);
        }
        for row in 0..n {
            if row == col || ring.is_zero(&m[row][col]) {
                continue;
            }
            let f = m[row][col].clone();
            for j in 0..n {
                m[row][j] = ring.sub(&m[row][j], &ring.mul(&f, &m[col][j]));
                inv[row][j] = ring.sub(&inv[row][j], &ring.mul(&f, &inv[col][j]));
            }
        }
    }
    Ok(inv)
}

/// Solves A x = b over a field-like ring.
pub fn solve<R: FieldLike>(ring: &R, a: &Matrix<R::El>, b: &[R::El]) -> Result<Vec<R::El>> {
    let inv = invert_matrix(ring, a)?;
    Ok(mat_vec(ring, &inv, b))
}

pub fn determinant_qq(a: &Matrix<Rat>) -> Rat {
    use num::{One, Zero};
    let n = a.len();
    let mut m = a.clone();
    let mut det = Rat::one();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det *= &m[col][col].clone();
        let inv = Rat::one() / &m[col][col];
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] * &inv;
            for j in col..n {
                let t = &m[r][j] - &(&f * &m[col][j]);
                m[r][j] = t;
            }
        }
    }
    det
}

/// Exact solve of the square linear system with the Cauchy matrix
/// A_{ik} = 1/(a_i + k), offsets pairwise distinct, k = 1..n.
pub fn cauchy_solve(offsets: &[Rat], rhs: &[Rat]) -> Result<Vec<Rat>> {
    let n = offsets.len();
    if rhs.len() != n {
        return Err(Error::Invalid("offset/rhs length mismatch".into()));
    }
    use num::One;
    let mut a = vec![vec![Rat::one(); n]; n];
    for (i, off) in offsets.iter().enumerate() {
        for k in 1..=n {
            let d = off + Rat::from(num::BigInt::from(k as i64));
            if num::Zero::is_zero(&d) {
                return Err(Error::Invalid("Cauchy denominator vanishes".into()));
            }
            a[i][k - 1] = Rat::one() / d;
        }
    }
    solve(&Rationals, &a, rhs)
}
