//! Sparse multivariate polynomials over a coefficient field.
//!
//! Monomial keys are exponent vectors with trailing zeros trimmed, so the
//! ring does not fix the number of variables up front. `MPoly` implements
//! [`Field`] with `inv` defined exactly on nonzero constants; that is enough
//! for the rewriting engine, which multiplies and adds rule coefficients but
//! never divides by one, and it lets polynomial-coefficient rule systems run
//! through the same machinery as numeric ones.

use std::collections::BTreeMap;

use num::BigRational;

use crate::field::Field;

/// Exponent vector, trailing zeros trimmed (canonical form).
pub type Mono = Vec<u16>;

fn trim(mut m: Mono) -> Mono {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let len = a.len().max(b.len());
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        out.push(a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MPoly<F: Field> {
    /// monomial -> nonzero coefficient.
    pub terms: BTreeMap<Mono, F>,
}

impl<F: Field> MPoly<F> {
    pub fn constant(c: F) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        MPoly { terms }
    }

    /// The variable x_i.
    pub fn var(i: usize) -> Self {
        let mut m = vec![0u16; i + 1];
        m[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(m, F::one());
        MPoly { terms }
    }

    /// Some(c) when the polynomial is the constant c (zero included).
    pub fn as_constant(&self) -> Option<F> {
        match self.terms.len() {
            0 => Some(F::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// Largest index of a variable that appears, if any does.
    pub fn top_var(&self) -> Option<usize> {
        self.terms.keys().filter(|m| !m.is_empty()).map(|m| m.len() - 1).max()
    }

    /// Indices of all variables that appear.
    pub fn vars(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for m in self.terms.keys() {
            for (i, &e) in m.iter().enumerate() {
                if e > 0 && !out.contains(&i) {
                    out.push(i);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn degree_in(&self, i: usize) -> u16 {
        self.terms
            .keys()
            .map(|m| m.get(i).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Coefficients (low to high) when every monomial uses only variable i.
    pub fn as_univariate(&self, i: usize) -> Option<Vec<F>> {
        let deg = self.degree_in(i) as usize;
        let mut coeffs = vec![F::zero(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.get(i).copied().unwrap_or(0) as usize;
            let pure = m
                .iter()
                .enumerate()
                .all(|(j, &x)| j == i || x == 0);
            if !pure {
                return None;
            }
            coeffs[e] = coeffs[e].add(c);
        }
        Some(coeffs)
    }

    /// Substitute values for a subset of variables (None keeps it symbolic).
    pub fn substitute(&self, values: &[Option<F>]) -> MPoly<F> {
        let mut acc = MPoly::constant(F::zero());
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut residual: Mono = vec![0; m.len()];
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match values.get(i).and_then(|v| v.as_ref()) {
                    Some(val) => coeff = coeff.mul(&val.pow(e as u64)),
                    None => residual[i] = e,
                }
            }
            let mut t = MPoly::constant(coeff);
            if !t.terms.is_empty() {
                let key = trim(residual);
                let mut terms = BTreeMap::new();
                terms.insert(key, t.terms.remove(&Vec::new()).unwrap_or_else(F::zero));
                t = MPoly { terms };
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Scale so the lead (largest monomial) coefficient is one.
    pub fn monic(&self) -> MPoly<F> {
        match self.terms.iter().next_back() {
            Some((_, c)) => {
                let inv = c.inv().expect("nonzero lead coefficient");
                let terms = self
                    .terms
                    .iter()
                    .map(|(m, x)| (m.clone(), x.mul(&inv)))
                    .collect();
                MPoly { terms }
            }
            None => self.clone(),
        }
    }

    /// Render with the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = names
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| format!("x{i}"));
                if e == 1 {
                    factors.push(name);
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            let coeff = format!("{c:?}");
            if factors.is_empty() {
                parts.push(coeff);
            } else if c == &F::one() {
                parts.push(factors.join("*"));
            } else {
                parts.push(format!("({coeff})*{}", factors.join("*")));
            }
        }
        parts.join(" + ")
    }
}

impl<F: Field> Field for MPoly<F> {
    fn zero() -> Self {
        MPoly {
            terms: BTreeMap::new(),
        }
    }
    fn one() -> Self {
        MPoly::constant(F::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = terms.entry(m.clone()).or_insert_with(F::zero);
            *entry = entry.add(c);
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        MPoly { terms }
    }
    fn neg(&self) -> Self {
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<Mono, F> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = mono_mul(ma, mb);
                let entry = terms.entry(m).or_insert_with(F::zero);
                *entry = entry.add(&ca.mul(cb));
            }
        }
        terms.retain(|_, c| !c.is_zero());
        MPoly { terms }
    }
    /// Only constants are invertible in the polynomial ring.
    fn inv(&self) -> Option<Self> {
        match self.as_constant() {
            Some(c) => c.inv().map(MPoly::constant),
            None => None,
        }
    }
    fn from_i64(n: i64) -> Self {
        MPoly::constant(F::from_i64(n))
    }
    fn from_rat(r: &BigRational) -> Self {
        MPoly::constant(F::from_rat(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_i, Rat};

    fn x() -> MPoly<Rat> {
        MPoly::var(0)
    }
    fn y() -> MPoly<Rat> {
        MPoly::var(1)
    }

    #[test]
    fn arithmetic_and_constants() {
        let p = x().mul(&x()).add(&y().mul(&MPoly::constant(rat_i(3))));
        assert_eq!(p.degree_in(0), 2);
        assert_eq!(p.degree_in(1), 1);
        assert!(p.as_constant().is_none());
        let z = p.sub(&p);
        assert!(z.is_zero());
        assert_eq!(MPoly::<Rat>::from_i64(5).as_constant(), Some(rat_i(5)));
    }

    #[test]
    fn inversion_is_constants_only() {
        assert!(x().inv().is_none());
        assert!(MPoly::<Rat>::zero().inv().is_none());
        let c = MPoly::<Rat>::from_i64(4).inv().unwrap();
        assert_eq!(c.as_constant(), Some(Rat::new(1.into(), 4.into())));
    }

    #[test]
    fn substitution_and_univariate() {
        // p = x^2 y + 2x; at y = 3: 3x^2 + 2x.
        let p = x()
            .mul(&x())
            .mul(&y())
            .add(&x().mul(&MPoly::constant(rat_i(2))));
        let sub = p.substitute(&[None, Some(rat_i(3))]);
        let coeffs = sub.as_univariate(0).unwrap();
        assert_eq!(coeffs, vec![rat_i(0), rat_i(2), rat_i(3)]);
        assert!(p.as_univariate(0).is_none());
        let full = p.substitute(&[Some(rat_i(2)), Some(rat_i(3))]);
        assert_eq!(full.as_constant(), Some(rat_i(16)));
    }

    #[test]
    fn rendering_names_variables() {
        let p = x().mul(&x()).add(&y().neg());
        let s = p.render(&["a".into(), "b".into()]);
        assert!(s.contains("a^2"), "{s}");
        assert!(s.contains('b'), "{s}");
    }
}
