//! Truncated power series in z = t-1 over ℚ.
//!
//! The lifting arena is ℚ[[t-1]] modulo (t-1)^N. A series stores exactly N
//! coefficients (index i holds the coefficient of (t-1)^i) as integer
//! numerators over one shared positive denominator, kept coprime to the
//! numerator content; this keeps additions and convolutions free of
//! per-coefficient gcd reductions. Every operation is closed modulo
//! (t-1)^N. Rational-function reconstruction (Padé) from a truncation is
//! done by the extended Euclidean algorithm on (z^(a+b+1), s) and is
//! verified by re-multiplication before returning.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::Rat;
use crate::ring::{Rationals, Ring};
use num::{BigInt, Integer, One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries {
    /// numerators of (t-1)^0 .. (t-1)^(order-1)
    num: Vec<BigInt>,
    /// shared positive denominator, coprime to the numerator content
    den: BigInt,
}

impl TruncSeries {
    fn normalized(mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        if den.is_negative() {
            den = -den;
            for n in num.iter_mut() {
                *n = -(&*n);
            }
        }
        let mut g = den.clone();
        for n in &num {
            if g.is_one() {
                break;
            }
            if !n.is_zero() {
                g = g.gcd(n);
            }
        }
        if !g.is_one() {
            den /= &g;
            for n in num.iter_mut() {
                *n /= &g;
            }
        }
        TruncSeries { num, den }
    }

    pub fn order(&self) -> usize {
        self.num.len()
    }

    pub fn constant(c: Rat, order: usize) -> Self {
        let mut num = vec![BigInt::zero(); order];
        let (n, d) = c.into();
        num[0] = n;
        TruncSeries { num, den: d }
    }

    /// The series of t itself: 1 + (t-1).
    pub fn t_series(order: usize) -> Self {
        let mut num = vec![BigInt::zero(); order];
        num[0] = BigInt::one();
        if order > 1 {
            num[1] = BigInt::one();
        }
        TruncSeries {
            num,
            den: BigInt::one(),
        }
    }

    pub fn from_rats(coeffs: &[Rat]) -> Self {
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        TruncSeries { num, den }
    }

    /// Coefficient of (t-1)^i as a reduced rational.
    pub fn coeff(&self, i: usize) -> Rat {
        Rat::new(self.num[i].clone(), self.den.clone())
    }

    pub fn to_rats(&self) -> Vec<Rat> {
        (0..self.order()).map(|i| self.coeff(i)).collect()
    }

    /// Re-truncates or zero-pads to the given order.
    pub fn with_order(&self, order: usize) -> Self {
        let mut num = self.num.clone();
        num.resize(order, BigInt::zero());
        if order < self.num.len() {
            // truncation can change the content
            TruncSeries::normalized(num, self.den.clone())
        } else {
            TruncSeries {
                num,
                den: self.den.clone(),
            }
        }
    }

    /// Least exponent with nonzero coefficient, or None for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.num.iter().position(|c| !c.is_zero())
    }

    /// True when all coefficients below `upto` vanish.
    pub fn low_zero(&self, upto: usize) -> bool {
        self.num[..upto.min(self.num.len())]
            .iter()
            .all(|c| c.is_zero())
    }

    /// Truncation as a polynomial in z = t-1.
    pub fn to_poly(&self) -> Poly<Rat> {
        Poly::from_rats(self.to_rats())
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return TruncSeries {
                num: vec![BigInt::zero(); self.order()],
                den: BigInt::one(),
            };
        }
        TruncSeries::normalized(
            self.num.iter().map(|n| n * c.numer()).collect(),
            &self.den * c.denom(),
        )
    }
}

/// The ring ℚ[[t-1]] / (t-1)^order.
#[derive(Clone, Copy, Debug)]
pub struct SeriesRing {
    pub order: usize,
}

impl SeriesRing {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        SeriesRing { order }
    }

    /// Multiplicative inverse; requires an invertible constant term.
    pub fn invert(&self, a: &TruncSeries) -> Result<TruncSeries> {
        let c = a.to_rats();
        if c[0].is_zero() {
            return Err(Error::Invalid("series with zero constant term".into()));
        }
        let c0inv = Rat::one() / &c[0];
        let mut out = vec![Rat::zero(); self.order];
        out[0] = c0inv.clone();
        for k in 1..self.order {
            let mut acc = Rat::zero();
            for j in 0..k {
                if !c[k - j].is_zero() {
                    acc += &c[k - j] * &out[j];
                }
            }
            out[k] = -acc * &c0inv;
        }
        Ok(TruncSeries::from_rats(&out))
    }
}

impl Ring for SeriesRing {
    type El = TruncSeries;

    fn zero(&self) -> TruncSeries {
        TruncSeries {
            num: vec![BigInt::zero(); self.order],
            den: BigInt::one(),
        }
    }
    fn one(&self) -> TruncSeries {
        TruncSeries::constant(Rat::one(), self.order)
    }
    fn add(&self, a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
        debug_assert_eq!(a.order(), self.order);
        debug_assert_eq!(b.order(), self.order);
        if a.den == b.den {
            return TruncSeries::normalized(
                a.num.iter().zip(&b.num).map(|(x, y)| x + y).collect(),
                a.den.clone(),
            );
        }
        let g = a.den.gcd(&b.den);
        let la = &b.den / &g;
        let lb = &a.den / &g;
        let num = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| x * &la + y * &lb)
            .collect();
        TruncSeries::normalized(num, &a.den * &la)
    }
    fn sub(&self, a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
        self.add(a, &self.neg(b))
    }
    fn mul(&self, a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
        let n = self.order;
        if self.is_zero(a) || self.is_zero(b) {
            return self.zero();
        }
        let mut out = vec![BigInt::zero(); n];
        for i in 0..n.min(a.num.len()) {
            if a.num[i].is_zero() {
                continue;
            }
            for j in 0..(n - i).min(b.num.len()) {
                if b.num[j].is_zero() {
                    continue;
                }
                out[i + j] += &a.num[i] * &b.num[j];
            }
        }
        TruncSeries::normalized(out, &a.den * &b.den)
    }
    fn neg(&self, a: &TruncSeries) -> TruncSeries {
        TruncSeries {
            num: a.num.iter().map(|x| -x).collect(),
            den: a.den.clone(),
        }
    }
    fn from_rat(&self, q: &Rat) -> TruncSeries {
        TruncSeries::constant(q.clone(), self.order)
    }
    fn is_zero(&self, a: &TruncSeries) -> bool {
        a.num.iter().all(|c| c.is_zero())
    }
}

/// Rational-function reconstruction in z = t-1.
///
/// Given a series truncation `s` of p/q with deg p <= num_deg,
/// deg q <= den_deg and q(t=1) != 0 (that is, q(z=0) != 0), recovers (p, q)
/// as polynomials in z with q monic and gcd(p, q) = 1. The series must carry
/// at least num_deg + den_deg + 1 coefficients; exactly that many are used,
/// and the result is verified against the full truncation.
pub fn pade_reconstruct(
    s: &TruncSeries,
    num_deg: usize,
    den_deg: usize,
) -> Result<(Poly<Rat>, Poly<Rat>)> {
    let needed = num_deg + den_deg + 1;
    if s.order() < needed {
        return Err(Error::Invalid(format!(
            "series order {} below reconstruction requirement {}",
            s.order(),
            needed
        )));
    }
    let qq = Rationals;
    let s_rats = s.to_rats();
    let s_poly = Poly::from_rats(s_rats[..needed].to_vec());

    // Extended Euclid on (z^needed, s), stopping at the first remainder of
    // degree <= num_deg; the second cofactor is the denominator candidate.
    let mut r0 = Poly::shift_up(&qq, &Poly::from_rats(vec![Rat::one()]), needed);
    let mut r1 = s_poly;
    let mut v0: Poly<Rat> = Poly::zero();
    let mut v1 = Poly::from_rats(vec![Rat::one()]);
    while r1.degree().map_or(false, |d| d > num_deg) {
        let (quo, rem) = r0.div_rem(&r1);
        let nv = Poly::sub(&qq, &v0, &Poly::mul(&qq, &quo, &v1));
        r0 = r1;
        r1 = rem;
        v0 = v1;
        v1 = nv;
    }
    let (mut p, mut den) = (r1, v1);
    if den.is_zero_poly() {
        return Err(Error::NoReconstruction);
    }
    let g = p.gcd(&den);
    if g.degree().map_or(false, |d| d > 0) {
        p = p.exact_div(&g).unwrap();
        den = den.exact_div(&g).unwrap();
    }
    // q(z=0) must be a unit for the fraction to be a series at t=1.
    if den.coeffs().first().map_or(true, |c| c.is_zero()) {
        return Err(Error::NoReconstruction);
    }
    if den.degree().unwrap() > den_deg || p.degree().map_or(false, |d| d > num_deg) {
        return Err(Error::NoReconstruction);
    }
    // Normalise the denominator monic.
    let lc = den.leading().unwrap().clone();
    let scale = Poly::constant(&qq, Rat::one() / lc);
    p = Poly::mul(&qq, &p, &scale);
    den = Poly::mul(&qq, &den, &scale);

    // Verify p = s * den against the full available truncation.
    let ring = SeriesRing::new(s.order());
    let pad = |poly: &Poly<Rat>| -> TruncSeries {
        let mut c = poly.coeffs().to_vec();
        c.resize(s.order(), Rat::zero());
        TruncSeries::from_rats(&c)
    };
    if ring.sub(&ring.mul(s, &pad(&den)), &pad(&p)) != ring.zero() {
        return Err(Error::NoReconstruction);
    }
    Ok((p, den))
}

/// Puts reduced fractions (p_i, q_i) over the least common denominator.
///
/// Returns the scaled numerators and the monic lcm q. Because each input
/// fraction is reduced, the numerator family together with q carries no
/// common polynomial factor.
pub fn common_denominator(fractions: &[(Poly<Rat>, Poly<Rat>)]) -> (Vec<Poly<Rat>>, Poly<Rat>) {
    let qq = Rationals;
    let mut lcm = Poly::from_rats(vec![Rat::one()]);
    for (_, q) in fractions {
        assert!(!q.is_zero_poly(), "zero denominator");
        let g = lcm.gcd(q);
        lcm = Poly::mul(&qq, &lcm, &q.exact_div(&g).unwrap()).monic();
    }
    let nums = fractions
        .iter()
        .map(|(p, q)| Poly::mul(&qq, p, &lcm.exact_div(q).unwrap()))
        .collect();
    (nums, lcm)
}

/// Evaluates a polynomial in z = t-1 at t = 0, i.e. at z = -1: the
/// alternating-sign coefficient sum.
pub fn eval_at_t0(p: &Poly<Rat>) -> Rat {
    p.eval(&Rationals, &-Rat::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qpoly;
    use crate::rational::{rat, ratio};

    /// Series expansion oracle: p/q around t=1 by long division.
    fn expand(p: &Poly<Rat>, q: &Poly<Rat>, order: usize) -> TruncSeries {
        let ring = SeriesRing::new(order);
        let pad = |poly: &Poly<Rat>| -> TruncSeries {
            let mut c = poly.coeffs().to_vec();
            c.resize(order, Rat::zero());
            TruncSeries::from_rats(&c)
        };
        ring.mul(&pad(p), &ring.invert(&pad(q)).unwrap())
    }

    #[test]
    fn scaled_representation_canonical() {
        let a = TruncSeries::from_rats(&[ratio(1, 2), ratio(1, 3)]);
        let b = TruncSeries::from_rats(&[ratio(3, 6), ratio(2, 6)]);
        assert_eq!(a, b);
        let ring = SeriesRing::new(2);
        assert_eq!(ring.sub(&a, &b), ring.zero());
        assert_eq!(a.coeff(0), ratio(1, 2));
        assert_eq!(a.coeff(1), ratio(1, 3));
    }

    #[test]
    fn geometric_series() {
        // 1/(2-t) = 1/(1-z) at z = t-1: coefficients all 1.
        let one = qpoly(&[1]);
        let den = qpoly(&[1, -1]); // 2-t = 1-z
        let s = expand(&one, &den, 5);
        assert_eq!(s.to_rats(), vec![rat(1); 5]);
        let (p, q) = pade_reconstruct(&s, 0, 1).unwrap();
        assert_eq!(p, qpoly(&[-1]));
        assert_eq!(q, qpoly(&[-1, 1])); // monic normalisation of 1-z
    }

    #[test]
    fn polynomial_input_reconstructs_as_itself() {
        let p = qpoly(&[3, 0, -2, 1]);
        let mut c = p.coeffs().to_vec();
        c.resize(9, Rat::zero());
        let s = TruncSeries::from_rats(&c);
        let (pp, qq_) = pade_reconstruct(&s, 4, 4).unwrap();
        assert_eq!(pp, p);
        assert!(qq_.is_one());
    }

    #[test]
    fn derived_rational_function_roundtrip() {
        // (3t^2+1)/(t+1) in the z-basis: t = 1+z.
        let num = qpoly(&[4, 6, 3]); // 3(1+z)^2 + 1
        let den = qpoly(&[2, 1]); // (1+z) + 1
        let s = expand(&num, &den, 5);
        let (p, q) = pade_reconstruct(&s, 2, 2).unwrap();
        // agreement up to a scalar: p * den == num * q
        let qq = Rationals;
        assert_eq!(Poly::mul(&qq, &p, &den), Poly::mul(&qq, &num, &q));
    }

    #[test]
    fn pade_fails_without_enough_precision() {
        // A denominator vanishing at t=1 cannot be a series there.
        let s = TruncSeries::from_rats(&[rat(0), rat(1), rat(0), rat(0), rat(0)]);
        assert!(pade_reconstruct(&s, 0, 4).is_err());
    }

    #[test]
    fn pade_series_roundtrip_property() {
        // reconstruction after expansion is the identity on rational
        // functions with denominator nonvanishing at t=1.
        let cases = vec![
            (qpoly(&[1, 2]), qpoly(&[1, 0, 3])),
            (qpoly(&[-4, 0, 0, 1]), qpoly(&[2, -1, 1])),
            (qpoly(&[5]), qpoly(&[1, 7, 2, 1])),
        ];
        for (num, den) in cases {
            let (nd, dd) = (3usize, 4usize);
            let s = expand(&num, &den, nd + dd + 1);
            let (p, q) = pade_reconstruct(&s, nd, dd).unwrap();
            let qq = Rationals;
            assert_eq!(Poly::mul(&qq, &p, &den), Poly::mul(&qq, &num, &q));
        }
    }

    #[test]
    fn common_denominator_basic() {
        // [(1, z-1), (1, z+1)] -> ([z+1, z-1], z^2-1)
        let f = vec![
            (qpoly(&[1]), qpoly(&[-1, 1])),
            (qpoly(&[1]), qpoly(&[1, 1])),
        ];
        let (nums, q) = common_denominator(&f);
        assert_eq!(q, qpoly(&[-1, 0, 1]));
        assert_eq!(nums[0], qpoly(&[1, 1]));
        assert_eq!(nums[1], qpoly(&[-1, 1]));
        // single fraction is unchanged up to monic normalisation of q
        let single = vec![(qpoly(&[7, 1]), qpoly(&[0, 0, 2]))];
        let (nums, q) = common_denominator(&single);
        assert_eq!(q, qpoly(&[0, 0, 1]));
        // numerator rescaled by the same 1/2 that made q monic
        assert_eq!(nums[0], Poly::from_rats(vec![ratio(7, 2), ratio(1, 2)]));
    }

    #[test]
    fn common_denominator_identity_check() {
        // random triple: sum of fractions recombines identically
        let fracs = vec![
            (qpoly(&[1, 3]), qpoly(&[1, 1]).monic()),
            (qpoly(&[-2]), qpoly(&[2, 1]).monic()),
            (qpoly(&[0, 0, 5]), qpoly(&[1, 2, 1]).monic()),
        ];
        let (nums, q) = common_denominator(&fracs);
        let qq = Rationals;
        // sum p_i/q_i == (sum nums_i)/q as rational functions
        let mut lhs_num = Poly::zero();
        let mut lhs_den = qpoly(&[1]);
        for (p, d) in &fracs {
            lhs_num = Poly::add(
                &qq,
                &Poly::mul(&qq, &lhs_num, d),
                &Poly::mul(&qq, p, &lhs_den),
            );
            lhs_den = Poly::mul(&qq, &lhs_den, d);
        }
        let mut rhs_num = Poly::zero();
        for n in &nums {
            rhs_num = Poly::add(&qq, &rhs_num, n);
        }
        assert_eq!(
            Poly::mul(&qq, &lhs_num, &q),
            Poly::mul(&qq, &rhs_num, &lhs_den)
        );
    }

    #[test]
    fn eval_at_zero_of_t() {
        // t = 1 + z evaluated at t=0
        let t = qpoly(&[1, 1]);
        assert_eq!(eval_at_t0(&t), rat(0));
        let c = qpoly(&[3, -1, 2]); // 3 - z + 2z^2 at z=-1: 3+1+2
        assert_eq!(eval_at_t0(&c), rat(6));
    }

    #[test]
    fn series_invert() {
        let ring = SeriesRing::new(6);
        let a = TruncSeries::from_rats(&[rat(2), rat(-1), ratio(1, 3), rat(0), rat(5), rat(1)]);
        let inv = ring.invert(&a).unwrap();
        assert_eq!(ring.mul(&a, &inv), ring.one());
    }

    #[test]
    fn ring_axioms_spot() {
        let ring = SeriesRing::new(4);
        let a = TruncSeries::from_rats(&[ratio(1, 2), rat(3), rat(0), ratio(-2, 7)]);
        let b = TruncSeries::from_rats(&[rat(5), ratio(1, 3), rat(-1), rat(2)]);
        let c = TruncSeries::from_rats(&[rat(0), rat(1), ratio(4, 5), rat(-3)]);
        let ab_c = ring.mul(&ring.mul(&a, &b), &c);
        let a_bc = ring.mul(&a, &ring.mul(&b, &c));
        assert_eq!(ab_c, a_bc);
        let lhs = ring.mul(&a, &ring.add(&b, &c));
        let rhs = ring.add(&ring.mul(&a, &b), &ring.mul(&a, &c));
        assert_eq!(lhs, rhs);
    }
}
