//! Dense univariate polynomials and rational functions over exact rationals.
//! One distinguished symbol stays formal (a spectral variable); everything
//! else is already a number by the time these are built.

use crate::scalar::{rat_i, Rat};
use num::Zero;
use std::fmt;

/// Dense polynomial; `coeffs[i]` multiplies x^i; trailing zeros trimmed;
/// empty vector is the zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Poly { coeffs: vec![c] };
        p.trim();
        p
    }

    pub fn one() -> Self {
        Poly::constant(rat_i(1))
    }

    pub fn x() -> Self {
        Poly {
            coeffs: vec![rat_i(0), rat_i(1)],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(|| rat_i(0));
            let b = other.coeffs.get(i).cloned().unwrap_or_else(|| rat_i(0));
            out.push(a + b);
        }
        Poly::from_coeffs(out)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![rat_i(0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = rat_i(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * rat_i(i as i64 + 1))
                .collect(),
        )
    }

    /// Euclidean division: self = q*div + r with deg r < deg div.
    pub fn divmod(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let dd = div.degree().unwrap();
        let lead = div.leading().unwrap().clone();
        let mut q = vec![rat_i(0); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let factor = rem.leading().unwrap() / &lead;
            let shift = rd - dd;
            q[shift] = factor.clone();
            // rem -= factor * x^shift * div
            let mut sub = vec![rat_i(0); shift];
            sub.extend(div.coeffs.iter().map(|c| c * &factor));
            rem = rem.sub(&Poly::from_coeffs(sub));
        }
        (Poly::from_coeffs(q), rem)
    }

    /// Monic gcd via Euclid's algorithm.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b);
            a = b;
            b = r;
        }
        if let Some(lc) = a.leading().cloned() {
            a = a.scale(&lc.recip());
        }
        a
    }

    /// Substitute another rational function for x.
    pub fn compose(&self, inner: &RatFn) -> RatFn {
        let mut acc = RatFn::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&RatFn::constant(c.clone()));
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Univariate rational function in one spectral symbol; numerator and
/// denominator coprime, denominator monic, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    pub num: Poly,
    pub den: Poly,
}

pub type UniRationalFn = RatFn;

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let mut r = RatFn { num, den };
        r.normalize();
        r
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree() != Some(0) {
            self.num = self.num.divmod(&g).0;
            self.den = self.den.divmod(&g).0;
        }
        let lc = self.den.leading().unwrap().clone();
        if lc != rat_i(1) {
            let inv = lc.recip();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn zero() -> Self {
        RatFn {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFn {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        RatFn {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn x() -> Self {
        RatFn {
            num: Poly::x(),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFn {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().map_or(true, |d| d == 0) && self.den.degree() == Some(0)
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(rat_i(0));
        }
        if self.is_constant() {
            Some(self.num.coeffs[0].clone() / &self.den.coeffs[0])
        } else {
            None
        }
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        RatFn::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        RatFn::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn inv(&self) -> Option<RatFn> {
        if self.is_zero() {
            None
        } else {
            Some(RatFn::new(self.den.clone(), self.num.clone()))
        }
    }

    /// Exact evaluation; None exactly at a pole (reduced denominator root).
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn derivative(&self) -> RatFn {
        let n = self.num.derivative().mul(&self.den);
        let m = self.num.mul(&self.den.derivative());
        RatFn::new(n.sub(&m), self.den.mul(&self.den))
    }

    /// Limit as the variable goes to infinity: Some(0) if deg num < deg den,
    /// ratio of leading coefficients if equal, None if it diverges.
    pub fn limit_at_infinity(&self) -> Option<Rat> {
        if self.num.is_zero() {
            return Some(rat_i(0));
        }
        let dn = self.num.degree().unwrap();
        let dd = self.den.degree().unwrap();
        match dn.cmp(&dd) {
            std::cmp::Ordering::Less => Some(rat_i(0)),
            std::cmp::Ordering::Equal => {
                Some(self.num.leading().unwrap() / self.den.leading().unwrap())
            }
            std::cmp::Ordering::Greater => None,
        }
    }

    /// Substitute another rational function for the variable.
    pub fn compose(&self, inner: &RatFn) -> RatFn {
        let n = self.num.compose(inner);
        let d = self.den.compose(inner);
        n.mul(&d.inv().expect("composition hit identically-zero denominator"))
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "[{}] / [{}]", self.num, self.den)
        }
    }
}

impl crate::field::Field for RatFn {
    fn zero() -> Self {
        RatFn::zero()
    }
    fn one() -> Self {
        RatFn::one()
    }
    fn is_zero(&self) -> bool {
        RatFn::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        RatFn::add(self, other)
    }
    fn neg(&self) -> Self {
        RatFn::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        RatFn::mul(self, other)
    }
    fn inv(&self) -> Option<Self> {
        RatFn::inv(self)
    }
    fn from_i64(n: i64) -> Self {
        RatFn::constant(rat_i(n))
    }
    fn from_rat(r: &Rat) -> Self {
        RatFn::constant(r.clone())
    }
}

/// Lagrange interpolation through distinct nodes.
pub fn lagrange_interpolate(points: &[(Rat, Rat)]) -> Poly {
    let mut acc = Poly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut basis = Poly::one();
        let mut denom = rat_i(1);
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = basis.mul(&Poly::from_coeffs(vec![-xj.clone(), rat_i(1)]));
            denom *= xi - xj;
        }
        acc = acc.add(&basis.scale(&(yi / denom)));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn p(coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&c| rat_i(c)).collect())
    }

    #[test]
    fn divmod_roundtrip() {
        let a = p(&[1, 0, -3, 4, 2]);
        let b = p(&[2, 1]);
        let (q, r) = a.divmod(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn gcd_cancels() {
        // (x-1)(x+2) and (x-1)(x-3) share the monic factor x-1.
        let a = p(&[-1, 1]).mul(&p(&[2, 1]));
        let b = p(&[-1, 1]).mul(&p(&[-3, 1]));
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
    }

    #[test]
    fn ratfn_normalizes_to_coprime_monic() {
        let r = RatFn::new(p(&[-1, 1]).mul(&p(&[2, 1])), p(&[-1, 1]).mul(&p(&[0, 2])));
        // (x-1)(x+2) / (2x(x-1)) = (x+2)/(2x); den normalizes monic to x.
        assert_eq!(r.den, p(&[0, 1]));
        assert_eq!(r.num, Poly::from_coeffs(vec![rat_i(1), rat(1, 2)]));
    }

    #[test]
    fn derivative_quotient_rule() {
        // d/dx (x^2 / (x+1)) = (x^2 + 2x)/(x+1)^2
        let r = RatFn::new(p(&[0, 0, 1]), p(&[1, 1]));
        let d = r.derivative();
        assert_eq!(d, RatFn::new(p(&[0, 2, 1]), p(&[1, 2, 1])));
    }

    #[test]
    fn limits_at_infinity() {
        assert_eq!(
            RatFn::new(p(&[1, 2]), p(&[0, 0, 1])).limit_at_infinity(),
            Some(rat_i(0))
        );
        assert_eq!(
            RatFn::new(p(&[1, 6]), p(&[0, 2])).limit_at_infinity(),
            Some(rat_i(3))
        );
        assert_eq!(RatFn::new(p(&[0, 0, 1]), p(&[1, 1])).limit_at_infinity(), None);
    }

    #[test]
    fn compose_with_reciprocal() {
        // r(x) = (x^2+1)/x composed with 1/x gives (1+x^2)/x again.
        let r = RatFn::new(p(&[1, 0, 1]), p(&[0, 1]));
        let inv_x = RatFn::new(p(&[1]), p(&[0, 1]));
        assert_eq!(r.compose(&inv_x), r);
    }

    proptest! {
        #[test]
        fn lagrange_reconstructs_polynomials(coeffs in proptest::collection::vec(-50i64..50, 1..7)) {
            let poly = Poly::from_coeffs(coeffs.iter().map(|&c| rat_i(c)).collect());
            let deg = poly.degree().unwrap_or(0);
            let pts: Vec<(Rat, Rat)> = (0..=deg as i64)
                .map(|i| (rat_i(i), poly.eval(&rat_i(i))))
                .collect();
            let back = lagrange_interpolate(&pts);
            prop_assert_eq!(back, poly);
        }

        #[test]
        fn ratfn_field_axioms(an in -9i64..9, ad in 1i64..5, bn in -9i64..9, bd in 1i64..5) {
            // (a x + 1)/(x + ad) style fractions; checks add/mul consistency.
            let a = RatFn::new(p(&[1, an]), p(&[ad, 1]));
            let b = RatFn::new(p(&[bn, 1]), p(&[1, bd]));
            let ab = a.mul(&b);
            let ba = b.mul(&a);
            prop_assert_eq!(&ab, &ba);
            let s = a.add(&b);
            prop_assert_eq!(s.sub(&b), a);
            if !ab.is_zero() {
                prop_assert_eq!(ab.mul(&ab.inv().unwrap()), RatFn::one());
            }
        }
    }
}
