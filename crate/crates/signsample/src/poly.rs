//! Dense univariate polynomials.
//!
//! `Poly<T>` stores coefficients in ascending order with no trailing zeros
//! (the zero polynomial has an empty coefficient list). Generic arithmetic is
//! parametrised by a [`Ring`]; the richer Euclidean toolbox (gcd, squarefree
//! part, extended Euclid, resultants) is specific to ℚ coefficients.

use crate::rational::{rat, Rat};
use crate::ring::{Rationals, Ring};
use num::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Clone + PartialEq + std::fmt::Debug> Poly<T> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// Builds a polynomial from ascending coefficients, trimming ring zeros.
    pub fn new<R: Ring<El = T>>(ring: &R, mut coeffs: Vec<T>) -> Self {
        while coeffs.last().map_or(false, |c| ring.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant<R: Ring<El = T>>(ring: &R, c: T) -> Self {
        Poly::new(ring, vec![c])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero_poly(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// Coefficient of U^i, or the ring zero.
    pub fn coeff<R: Ring<El = T>>(&self, ring: &R, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ring.zero())
    }

    pub fn add<R: Ring<El = T>>(ring: &R, a: &Self, b: &Self) -> Self {
        let n = a.coeffs.len().max(b.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(ring.add(&a.coeff(ring, i), &b.coeff(ring, i)));
        }
        Poly::new(ring, out)
    }

    pub fn sub<R: Ring<El = T>>(ring: &R, a: &Self, b: &Self) -> Self {
        let n = a.coeffs.len().max(b.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(ring.sub(&a.coeff(ring, i), &b.coeff(ring, i)));
        }
        Poly::new(ring, out)
    }

    pub fn neg<R: Ring<El = T>>(ring: &R, a: &Self) -> Self {
        Poly {
            coeffs: a.coeffs.iter().map(|c| ring.neg(c)).collect(),
        }
    }

    /// Schoolbook product. Degree adds when the leading product is nonzero.
    pub fn mul<R: Ring<El = T>>(ring: &R, a: &Self, b: &Self) -> Self {
        if a.is_zero_poly() || b.is_zero_poly() {
            return Poly::zero();
        }
        let mut out = vec![ring.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ring.is_zero(ai) {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                out[i + j] = ring.add(&out[i + j], &ring.mul(ai, bj));
            }
        }
        Poly::new(ring, out)
    }

    pub fn scale<R: Ring<El = T>>(ring: &R, a: &Self, c: &T) -> Self {
        Poly::new(ring, a.coeffs.iter().map(|x| ring.mul(x, c)).collect())
    }

    /// Coefficient-wise derivative.
    pub fn derivative<R: Ring<El = T>>(&self, ring: &R) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(ring.mul(&ring.from_i64(i as i64), c));
        }
        Poly::new(ring, out)
    }

    /// Horner evaluation.
    pub fn eval<R: Ring<El = T>>(&self, ring: &R, x: &T) -> T {
        let mut acc = ring.zero();
        for c in self.coeffs.iter().rev() {
            acc = ring.add(&ring.mul(&acc, x), c);
        }
        acc
    }

    /// Remainder of `a` modulo a monic polynomial, valid over any ring.
    pub fn rem_monic<R: Ring<El = T>>(ring: &R, a: &Self, m: &Self) -> Self {
        let md = m.degree().expect("monic modulus is nonzero");
        assert!(md >= 1, "modulus must have positive degree");
        let mut rem = a.coeffs.clone();
        while rem.len() > md {
            let k = rem.len() - 1 - md;
            let lead = rem.pop().unwrap();
            if !ring.is_zero(&lead) {
                for (j, mj) in m.coeffs.iter().take(md).enumerate() {
                    rem[k + j] = ring.sub(&rem[k + j], &ring.mul(&lead, mj));
                }
            }
        }
        Poly::new(ring, rem)
    }

    /// X^k shift.
    pub fn shift_up<R: Ring<El = T>>(ring: &R, a: &Self, k: usize) -> Self {
        if a.is_zero_poly() {
            return Poly::zero();
        }
        let mut out = vec![ring.zero(); k];
        out.extend(a.coeffs.iter().cloned());
        Poly::new(ring, out)
    }

    pub fn map<U: Clone + PartialEq + std::fmt::Debug, RU: Ring<El = U>>(
        &self,
        ring: &RU,
        f: impl Fn(&T) -> U,
    ) -> Poly<U> {
        Poly::new(ring, self.coeffs.iter().map(f).collect())
    }
}

/// The monomial U over ℚ.
pub fn monomial_u() -> Poly<Rat> {
    Poly::new(&Rationals, vec![rat(0), rat(1)])
}

pub fn qpoly(coeffs: &[i64]) -> Poly<Rat> {
    Poly::new(&Rationals, coeffs.iter().map(|&c| rat(c)).collect())
}

impl Poly<Rat> {
    pub fn from_rats(coeffs: Vec<Rat>) -> Self {
        Poly::new(&Rationals, coeffs)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Divides by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(lc) => {
                if lc.is_one() {
                    self.clone()
                } else {
                    let inv = Rat::one() / lc;
                    Poly::from_rats(self.coeffs.iter().map(|c| c * &inv).collect())
                }
            }
        }
    }

    /// Euclidean division over ℚ: returns (quotient, remainder).
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quo = vec![Rat::zero(); rem.len() - dd];
        while rem.len() > dd {
            let lead = rem.last().unwrap().clone();
            let k = rem.len() - 1 - dd;
            if !lead.is_zero() {
                let q = &lead / &lc;
                for (j, mj) in d.coeffs.iter().take(dd).enumerate() {
                    let t = &rem[k + j] - &(&q * mj);
                    rem[k + j] = t;
                }
                quo[k] = q;
            }
            rem.pop();
        }
        (Poly::from_rats(quo), Poly::from_rats(rem))
    }

    /// Exact division; `None` when the remainder is nonzero.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        if self.is_zero_poly() {
            return Some(Poly::zero());
        }
        let (q, r) = self.div_rem(d);
        if r.is_zero_poly() {
            Some(q)
        } else {
            None
        }
    }

    /// Monic gcd by the Euclidean remainder sequence. Each remainder is
    /// renormalised to monic to keep coefficient growth in check; all steps
    /// are exact over ℚ.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero_poly() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a
    }

    /// Extended Euclid: returns (g, u, v) monic g with u*self + v*other = g.
    pub fn extended_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut u0 = qpoly(&[1]);
        let mut u1 = Poly::zero();
        let mut v0 = Poly::zero();
        let mut v1 = qpoly(&[1]);
        while !r1.is_zero_poly() {
            let (q, r) = r0.div_rem(&r1);
            let qq = Rationals;
            let nu = Poly::sub(&qq, &u0, &Poly::mul(&qq, &q, &u1));
            let nv = Poly::sub(&qq, &v0, &Poly::mul(&qq, &q, &v1));
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = nu;
            v0 = v1;
            v1 = nv;
        }
        match r0.leading() {
            None => (Poly::zero(), Poly::zero(), Poly::zero()),
            Some(lc) => {
                let inv = Rat::one() / lc;
                let s = Poly::constant(&Rationals, inv);
                let qq = Rationals;
                (
                    Poly::mul(&qq, &r0, &s),
                    Poly::mul(&qq, &u0, &s),
                    Poly::mul(&qq, &v0, &s),
                )
            }
        }
    }

    /// Monic squarefree part self / gcd(self, self').
    pub fn squarefree_part(&self) -> Self {
        assert!(!self.is_zero_poly(), "squarefree part of zero");
        let g = self.gcd(&self.derivative(&Rationals));
        if g.degree() == Some(0) {
            return self.monic();
        }
        self.exact_div(&g)
            .expect("gcd divides the polynomial")
            .monic()
    }

    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            _ => self.gcd(&self.derivative(&Rationals)).degree() == Some(0),
        }
    }

    /// Resultant of two ℚ-polynomials by the subresultant-style recurrence on
    /// the Euclidean sequence. Exact; returns 0 when both share a factor.
    pub fn resultant(&self, other: &Self) -> Rat {
        fn res(a: &Poly<Rat>, b: &Poly<Rat>) -> Rat {
            let m = match a.degree() {
                None => return Rat::zero(),
                Some(m) => m,
            };
            let n = match b.degree() {
                None => return Rat::zero(),
                Some(n) => n,
            };
            if n == 0 {
                return num::pow::pow(b.coeffs[0].clone(), m);
            }
            let (_, r) = a.div_rem(b);
            match r.degree() {
                None => Rat::zero(),
                Some(rd) => {
                    let lc = b.leading().unwrap();
                    let sign = if (m * n) % 2 == 1 { -Rat::one() } else { Rat::one() };
                    // res(a,b) = (-1)^{mn} lc(b)^{m-rd} res(b,r)
                    sign * num::pow::pow(lc.clone(), m - rd) * res(b, &r)
                }
            }
        }
        res(self, other)
    }

    /// Cauchy root bound: all real roots lie in (-B, B).
    pub fn root_bound(&self) -> Rat {
        let lc = self.leading().expect("root bound of zero polynomial");
        let mut m = Rat::zero();
        for c in &self.coeffs {
            let a = c.abs() / lc.abs();
            if a > m {
                m = a;
            }
        }
        m + Rat::one()
    }

    /// Composition self(g(U)) over ℚ.
    pub fn compose(&self, g: &Self) -> Self {
        let qq = Rationals;
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = Poly::mul(&qq, &acc, g);
            acc = Poly::add(&qq, &acc, &Poly::constant(&qq, c.clone()));
        }
        acc
    }

    /// Lagrange interpolation through distinct nodes.
    pub fn interpolate(points: &[(Rat, Rat)]) -> Self {
        let qq = Rationals;
        let mut acc = Poly::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut li = Poly::constant(&qq, yi.clone());
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let denom = xi - xj;
                assert!(!denom.is_zero(), "interpolation nodes must be distinct");
                let lin = Poly::from_rats(vec![-xj / &denom, Rat::one() / &denom]);
                li = Poly::mul(&qq, &li, &lin);
            }
            acc = Poly::add(&qq, &acc, &li);
        }
        acc
    }
}

/// Chebyshev polynomial of the first kind of even degree d >= 2, via the
/// recurrence T_{k+1} = 2x T_k - T_{k-1}.
pub fn chebyshev(d: usize) -> crate::error::Result<Poly<Rat>> {
    if d < 2 || d % 2 != 0 {
        return Err(crate::error::Error::Invalid(format!(
            "Chebyshev degree must be even and >= 2, got {d}"
        )));
    }
    Ok(chebyshev_any(d))
}

/// Chebyshev polynomial of any degree (internal helper; the public builder
/// enforces even degree as the initial systems require).
pub fn chebyshev_any(d: usize) -> Poly<Rat> {
    let qq = Rationals;
    let mut t0 = qpoly(&[1]);
    let mut t1 = qpoly(&[0, 1]);
    if d == 0 {
        return t0;
    }
    let two_x = qpoly(&[0, 2]);
    for _ in 1..d {
        let next = Poly::sub(&qq, &Poly::mul(&qq, &two_x, &t1), &t0);
        t0 = t1;
        t1 = next;
    }
    t1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;

    #[test]
    fn mul_difference_of_squares() {
        let a = qpoly(&[1, 1]);
        let b = qpoly(&[-1, 1]);
        assert_eq!(Poly::mul(&Rationals, &a, &b), qpoly(&[-1, 0, 1]));
    }

    #[test]
    fn mul_identity() {
        let a = qpoly(&[3, 0, 7, 2]);
        assert_eq!(Poly::mul(&Rationals, &a, &qpoly(&[1])), a);
    }

    // Independent convolution oracle for products.
    fn convolve(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
        for i in 0..a.len() {
            for j in 0..b.len() {
                out[i + j] += &a[i] * &b[j];
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn mul_matches_convolution(av in prop::collection::vec(-9i64..=9, 0..=9),
                                   bv in prop::collection::vec(-9i64..=9, 0..=9)) {
            let a = qpoly(&av);
            let b = qpoly(&bv);
            let prod = Poly::mul(&Rationals, &a, &b);
            let oracle = Poly::from_rats(convolve(a.coeffs(), b.coeffs()));
            prop_assert_eq!(prod, oracle);
        }

        #[test]
        fn ring_axioms_spot(av in prop::collection::vec(-5i64..=5, 0..=6),
                            bv in prop::collection::vec(-5i64..=5, 0..=6),
                            cv in prop::collection::vec(-5i64..=5, 0..=6)) {
            let qq = Rationals;
            let (a, b, c) = (qpoly(&av), qpoly(&bv), qpoly(&cv));
            let ab_c = Poly::mul(&qq, &Poly::mul(&qq, &a, &b), &c);
            let a_bc = Poly::mul(&qq, &a, &Poly::mul(&qq, &b, &c));
            prop_assert_eq!(&ab_c, &a_bc);
            let left = Poly::mul(&qq, &a, &Poly::add(&qq, &b, &c));
            let right = Poly::add(&qq, &Poly::mul(&qq, &a, &b), &Poly::mul(&qq, &a, &c));
            prop_assert_eq!(left, right);
        }
    }

    #[test]
    fn gcd_simple() {
        let a = qpoly(&[-1, 0, 1]); // U^2-1
        let b = qpoly(&[-1, 1]); // U-1
        assert_eq!(a.gcd(&b), b.monic());
        // gcd(a, 0) = monic(a)
        assert_eq!(a.gcd(&Poly::zero()), a.monic());
    }

    #[test]
    fn gcd_chebyshev_halving() {
        // gcd(T4', T4+1) is the degree-2 Chebyshev polynomial, made monic.
        let t4 = chebyshev(4).unwrap();
        let t2 = chebyshev(2).unwrap();
        let g = t4
            .derivative(&Rationals)
            .gcd(&Poly::add(&Rationals, &t4, &qpoly(&[1])));
        assert_eq!(g, t2.monic());
    }

    #[test]
    fn squarefree_part_examples() {
        let qq = Rationals;
        // (U-1)^2 (U+2) -> (U-1)(U+2)
        let a = Poly::mul(
            &qq,
            &Poly::mul(&qq, &qpoly(&[-1, 1]), &qpoly(&[-1, 1])),
            &qpoly(&[2, 1]),
        );
        let sf = a.squarefree_part();
        assert_eq!(sf, Poly::mul(&qq, &qpoly(&[-1, 1]), &qpoly(&[2, 1])).monic());
        // squarefree input stays itself (monic)
        let b = qpoly(&[2, 0, 1]);
        assert_eq!(b.squarefree_part(), b.monic());
        // gcd(sf, sf') = 1
        assert!(sf.is_squarefree());
    }

    #[test]
    fn squarefree_factor_list_oracle() {
        // Random repeated linear factors, rebuilt from the distinct list.
        let qq = Rationals;
        let roots = [ratio(1, 2), rat(3), rat(-2), ratio(1, 2), rat(3), rat(3)];
        let mut a = qpoly(&[1]);
        for r in &roots {
            a = Poly::mul(&qq, &a, &Poly::from_rats(vec![-r, Rat::one()]));
        }
        let mut distinct: Vec<&Rat> = vec![&roots[0], &roots[1], &roots[2]];
        distinct.dedup();
        let mut expect = qpoly(&[1]);
        for r in distinct {
            expect = Poly::mul(&qq, &expect, &Poly::from_rats(vec![-r, Rat::one()]));
        }
        assert_eq!(a.squarefree_part(), expect.monic());
    }

    #[test]
    fn chebyshev_small() {
        assert_eq!(chebyshev(2).unwrap(), qpoly(&[-1, 0, 2]));
        assert_eq!(chebyshev(4).unwrap(), qpoly(&[1, 0, -8, 0, 8]));
        assert!(chebyshev(3).is_err());
        assert!(chebyshev(0).is_err());
    }

    #[test]
    fn chebyshev_trig_oracle() {
        // T_8(cos θ) = cos 8θ, sampled at rational approximations of cos θ.
        let t8 = chebyshev(8).unwrap();
        for k in 1..8 {
            let theta = k as f64 * 0.37;
            let x = theta.cos();
            // nearest rational with denominator 2^20
            let den = 1 << 20;
            let num = (x * den as f64).round() as i64;
            let xq = ratio(num, den);
            let got = t8.eval(&Rationals, &xq);
            let gotf = got.numer().to_string().parse::<f64>().unwrap()
                / got.denom().to_string().parse::<f64>().unwrap();
            let expect = (8.0 * theta).cos();
            // |T8'| <= 64 on [-1,1], so the interval bound is 64/2^20 plus slack
            assert!(
                (gotf - expect).abs() < 1e-4,
                "T8({xq}) = {gotf} vs cos(8θ) = {expect}"
            );
        }
    }

    #[test]
    fn extended_gcd_bezout() {
        let a = qpoly(&[-2, 0, 1]);
        let b = qpoly(&[0, 1]);
        let (g, u, v) = a.extended_gcd(&b);
        assert!(g.is_one());
        let qq = Rationals;
        let lhs = Poly::add(&qq, &Poly::mul(&qq, &u, &a), &Poly::mul(&qq, &v, &b));
        assert!(lhs.is_one());
    }

    #[test]
    fn resultant_shared_root() {
        let qq = Rationals;
        let a = Poly::mul(&qq, &qpoly(&[-1, 1]), &qpoly(&[3, 1]));
        let b = Poly::mul(&qq, &qpoly(&[-1, 1]), &qpoly(&[5, 2]));
        assert!(a.resultant(&b).is_zero());
        let c = qpoly(&[1, 1]);
        assert!(!a.resultant(&c).is_zero());
    }

    #[test]
    fn resultant_product_of_differences() {
        // res(f,g) = lc(f)^deg g * lc(g)^deg f * prod (ri - sj) for monic split cases
        let qq = Rationals;
        let f = Poly::mul(&qq, &qpoly(&[-1, 1]), &qpoly(&[-2, 1])); // roots 1,2
        let g = qpoly(&[-4, 1]); // root 4
        // prod over roots: (1-4)(2-4) = 6
        assert_eq!(f.resultant(&g), rat(6));
    }

    #[test]
    fn interpolation_roundtrip() {
        let f = qpoly(&[3, -2, 0, 5]);
        let pts: Vec<(Rat, Rat)> = (0..4)
            .map(|i| (rat(i), f.eval(&Rationals, &rat(i))))
            .collect();
        assert_eq!(Poly::interpolate(&pts), f);
    }

    #[test]
    fn rem_monic_matches_div_rem() {
        let a = qpoly(&[1, 4, 0, 2, 7, 1]);
        let m = qpoly(&[2, 0, 1]); // monic
        let (_, r) = a.div_rem(&m);
        assert_eq!(Poly::rem_monic(&Rationals, &a, &m), r);
    }
}
