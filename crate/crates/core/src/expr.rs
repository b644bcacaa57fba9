//! Tiny exact expression language for guard predicates and rule coefficients.
//!
//! Grammar: `+ - * / ^` with integer exponents (possibly negative), integer
//! literals, parentheses, and symbols like `q`, `nu`, `u1`, `zhat`.

use crate::error::{Error, Result};
use crate::field::Field;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/({b})"),
            Expr::Pow(a, k) => write!(f, "({a})^{k}"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    let rhs = self.parse_factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.bump();
                    let rhs = self.parse_factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let expo = self.parse_int_exponent()?;
            return Ok(Expr::Pow(Box::new(base), expo));
        }
        Ok(base)
    }

    fn parse_int_exponent(&mut self) -> Result<i64> {
        let mut paren = false;
        if self.peek() == Some(b'(') {
            self.bump();
            paren = true;
        }
        let mut sign = 1i64;
        if self.peek() == Some(b'-') {
            self.bump();
            sign = -1;
        }
        let n = self.parse_uint()?;
        if paren {
            if self.peek() != Some(b')') {
                return Err(Error::Parse("expected `)` after exponent".into()));
            }
            self.bump();
        }
        Ok(sign * n)
    }

    fn parse_uint(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!(
                "expected integer at offset {}",
                self.pos
            )));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|e| Error::Parse(format!("bad integer: {e}")))
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let e = self.parse_expr()?;
                if self.peek() != Some(b')') {
                    return Err(Error::Parse("expected `)`".into()));
                }
                self.bump();
                Ok(e)
            }
            Some(b'-') => {
                self.bump();
                let e = self.parse_factor()?;
                Ok(Expr::Neg(Box::new(e)))
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Int(self.parse_uint()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                self.skip_ws();
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric()
                        || self.src[self.pos] == b'_'
                        || self.src[self.pos] == b'\'')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Expr::Sym(name.to_string()))
            }
            other => Err(Error::Parse(format!(
                "unexpected token {:?} at offset {}",
                other.map(|c| c as char),
                self.pos
            ))),
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser::new(src);
        let e = p.parse_expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Parse(format!(
                "trailing input at offset {} in `{src}`",
                p.pos
            )));
        }
        Ok(e)
    }

    /// Exact evaluation over any field. Division by zero and zero raised to a
    /// negative power report the offending subexpression.
    pub fn eval<F: Field>(&self, env: &BTreeMap<String, F>) -> Result<F> {
        match self {
            Expr::Int(n) => Ok(F::from_i64(*n)),
            Expr::Sym(s) => env.get(s).cloned().ok_or_else(|| Error::Parse(format!(
                "unbound symbol `{s}`"
            ))),
            Expr::Neg(e) => Ok(e.eval(env)?.neg()),
            Expr::Add(a, b) => Ok(a.eval(env)?.add(&b.eval(env)?)),
            Expr::Sub(a, b) => Ok(a.eval(env)?.sub(&b.eval(env)?)),
            Expr::Mul(a, b) => Ok(a.eval(env)?.mul(&b.eval(env)?)),
            Expr::Div(a, b) => {
                let den = b.eval(env)?;
                let inv = den.inv().ok_or_else(|| Error::Pole {
                    factor: b.to_string(),
                    context: self.to_string(),
                })?;
                Ok(a.eval(env)?.mul(&inv))
            }
            Expr::Pow(a, k) => {
                let base = a.eval(env)?;
                if *k < 0 {
                    let inv = base.inv().ok_or_else(|| Error::Pole {
                        factor: a.to_string(),
                        context: self.to_string(),
                    })?;
                    Ok(inv.pow((-k) as u64))
                } else {
                    Ok(base.pow(*k as u64))
                }
            }
        }
    }

    /// Symbols referenced by this expression.
    pub fn symbols(&self, out: &mut Vec<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Sym(s) => {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
            Expr::Neg(e) | Expr::Pow(e, _) => e.symbols(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.symbols(out);
                b.symbols(out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_i, Rat};

    fn env(pairs: &[(&str, Rat)]) -> BTreeMap<String, Rat> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    #[test]
    fn parses_and_evaluates() {
        let e = Expr::parse("q^2 - 1").unwrap();
        let v = e.eval(&env(&[("q", rat_i(3))])).unwrap();
        assert_eq!(v, rat_i(8));

        let e = Expr::parse("(q - q^-1) * nu").unwrap();
        let v = e
            .eval(&env(&[("q", rat(1, 2)), ("nu", rat_i(6))]))
            .unwrap();
        assert_eq!(v, rat_i(-9));
    }

    #[test]
    fn negative_exponent_and_unary_minus() {
        let e = Expr::parse("-q^(-2) + 1/4").unwrap();
        let v = e.eval(&env(&[("q", rat_i(2))])).unwrap();
        assert_eq!(v, Rat::from_integer(0.into()));
    }

    #[test]
    fn division_by_zero_reports_factor() {
        let e = Expr::parse("1/(q-1)").unwrap();
        let err = e.eval(&env(&[("q", rat_i(1))])).unwrap_err();
        match err {
            Error::Pole { factor, .. } => assert!(factor.contains("q-1") || factor.contains("(q-1)")),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn unbound_symbol_errors() {
        let e = Expr::parse("q + z9").unwrap();
        assert!(e.eval(&env(&[("q", rat_i(1))])).is_err());
    }
}
