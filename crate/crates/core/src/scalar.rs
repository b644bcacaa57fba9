//! Exact rational scalars, guarded generic-point sampling, and the registry of
//! named closed-form scalar functions used across the identity suites.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::Field;
use num::{BigInt, BigRational};
use once_cell::sync::Lazy;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Exact rational scalar: arbitrary-precision, always in lowest terms,
/// positive denominator. No rounding happens anywhere in the workbench.
pub type Rat = BigRational;

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exact rational square root, when one exists.
pub fn rat_sqrt(r: &Rat) -> Option<Rat> {
    rat_nth_root(r, 2)
}

/// Exact rational k-th root, when one exists (negative inputs allowed for
/// odd k).
pub fn rat_nth_root(r: &Rat, k: u32) -> Option<Rat> {
    use num::Signed;
    assert!(k >= 1);
    if num::Zero::is_zero(r) {
        return Some(rat_i(0));
    }
    if r.is_negative() && k % 2 == 0 {
        return None;
    }
    let neg = r.is_negative();
    let n = r.numer().abs();
    let d = r.denom().abs();
    let sn = n.nth_root(k);
    let sd = d.nth_root(k);
    if num::pow(sn.clone(), k as usize) == n && num::pow(sd.clone(), k as usize) == d {
        let root = Rat::new(sn, sd);
        Some(if neg { -root } else { root })
    } else {
        None
    }
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Default magnitude bound for sampled numerators and denominators.
pub const DEFAULT_MAGNITUDE: i64 = 10_000;

/// Rejection-sampling rounds before declaring the guard set contradictory.
pub const MAX_ROUNDS: u32 = 1000;

/// An exact assignment of rationals to formal symbols, reproducible from its
/// seed, with every registered guard verified nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPoint {
    pub assignment: BTreeMap<String, Rat>,
    pub seed: u64,
    /// Guard predicates checked during sampling, as written.
    pub guard_log: Vec<String>,
    /// Rejection rounds consumed before the accepted assignment.
    pub rejected_rounds: u32,
}

impl ParameterPoint {
    pub fn get(&self, sym: &str) -> &Rat {
        self.assignment
            .get(sym)
            .unwrap_or_else(|| panic!("symbol `{sym}` absent from parameter point"))
    }

    pub fn try_get(&self, sym: &str) -> Option<&Rat> {
        self.assignment.get(sym)
    }

    /// Record a derived symbol (e.g. a value computed from sampled ones).
    /// Keeps the point a pure function of (symbols, guards, seed).
    pub fn extend(&mut self, sym: &str, value: Rat) {
        self.assignment.insert(sym.to_string(), value);
    }

    pub fn env(&self) -> BTreeMap<String, Rat> {
        self.assignment.clone()
    }

    /// Evaluate an expression string at this point.
    pub fn eval(&self, src: &str) -> Result<Rat> {
        Expr::parse(src)?.eval(&self.assignment)
    }
}

fn sample_rat<R: Rng>(rng: &mut R, magnitude: i64) -> Rat {
    let num = rng.gen_range(1..=magnitude);
    let den = rng.gen_range(1..=magnitude);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    Rat::new(BigInt::from(sign * num), BigInt::from(den))
}

/// Sample an assignment for `symbols` such that every guard expression is
/// nonzero, deterministically from `seed`. Symbols are sorted and deduplicated
/// first, so the result is a pure function of (symbols, guards, seed).
pub fn sample_generic_with(
    symbols: &[&str],
    guards: &[&str],
    seed: u64,
    magnitude: i64,
) -> Result<ParameterPoint> {
    let mut syms: Vec<&str> = symbols.to_vec();
    syms.sort_unstable();
    syms.dedup();
    let parsed: Vec<Expr> = guards
        .iter()
        .map(|g| Expr::parse(g))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for round in 0..MAX_ROUNDS {
        let mut assignment = BTreeMap::new();
        for s in &syms {
            assignment.insert(s.to_string(), sample_rat(&mut rng, magnitude));
        }
        let ok = parsed.iter().all(|g| match g.eval(&assignment) {
            Ok(v) => !Field::is_zero(&v),
            Err(_) => false,
        });
        if ok {
            return Ok(ParameterPoint {
                assignment,
                seed,
                guard_log: guards.iter().map(|s| s.to_string()).collect(),
                rejected_rounds: round,
            });
        }
    }
    Err(Error::GuardExhaustion {
        rounds: MAX_ROUNDS,
        guards: guards.iter().map(|s| s.to_string()).collect(),
    })
}

pub fn sample_generic(symbols: &[&str], guards: &[&str], seed: u64) -> Result<ParameterPoint> {
    sample_generic_with(symbols, guards, seed, DEFAULT_MAGNITUDE)
}

/// A named closed-form scalar function with explicitly factored denominator,
/// so a vanishing factor can be reported by name.
pub struct Formula {
    pub params: Vec<&'static str>,
    pub numerator: Expr,
    pub den_factors: Vec<(String, Expr)>,
}

fn formula(params: &[&'static str], num: &str, dens: &[&str]) -> Formula {
    Formula {
        params: params.to_vec(),
        numerator: Expr::parse(num).unwrap(),
        den_factors: dens
            .iter()
            .map(|d| (d.to_string(), Expr::parse(d).unwrap()))
            .collect(),
    }
}

/// Registry of the workbench's closed-form scalar functions.
///
/// mu      : loop value, (nu*q+1)(q-nu)/(nu(q^2-1)); equals (q-q^-1+nu^-1-nu)/(q-q^-1)
/// f       : inverse-law factor f(u,v) = (u-v)^2/((u-q^2 v)(u-q^-2 v))
/// F       : crossing factor F(x) = (x nu+q)^2/((x nu+q^3)(x nu+q^-1))
/// N       : transfer normalizer N(s) = (q^2-s nu^2)(s nu+q^-1)/(s nu+q), s = z^2
/// G       : unitarity scalar G(y) = (q^2-y)(y q^2-1)/(q^2 y)
/// c       : boundary constant, c = w^2 (w kept as an explicit square root)
/// zhat    : boundary eigenvalue, zhat = -nu q^-1 w^-2 (from c = -nu q^-1 zhat^-1)
/// cprime  : second boundary constant, c' = wp^2
pub static REGISTRY: Lazy<BTreeMap<&'static str, Formula>> = Lazy::new(|| {
    let mut m = BTreeMap::new();
    m.insert(
        "mu",
        formula(&[], "(nu*q+1)*(q-nu)", &["nu", "q^2-1"]),
    );
    m.insert(
        "f",
        formula(&["u", "v"], "q^2*(u-v)^2", &["u-q^2*v", "q^2*u-v"]),
    );
    m.insert(
        "F",
        formula(&["x"], "q*(x*nu+q)^2", &["x*nu+q^3", "q*x*nu+1"]),
    );
    m.insert(
        "N",
        formula(&["s"], "(q^2-s*nu^2)*(q*s*nu+1)", &["s*nu+q", "q"]),
    );
    m.insert(
        "G",
        formula(&["y"], "(q^2-y)*(y*q^2-1)", &["q^2", "y"]),
    );
    m.insert("c", formula(&[], "w^2", &[]));
    m.insert("zhat", formula(&[], "-nu", &["q", "w^2"]));
    m.insert("cprime", formula(&[], "wp^2", &[]));
    m
});

/// Evaluate a registered formula at explicit arguments over a parameter point.
pub fn eval_formula(name: &str, args: &[Rat], point: &ParameterPoint) -> Result<Rat> {
    let f = REGISTRY
        .get(name)
        .ok_or_else(|| Error::Parse(format!("unregistered formula `{name}`")))?;
    if args.len() != f.params.len() {
        return Err(Error::Parse(format!(
            "formula `{name}` takes {} args, got {}",
            f.params.len(),
            args.len()
        )));
    }
    let mut env = point.assignment.clone();
    for (p, a) in f.params.iter().zip(args) {
        env.insert(p.to_string(), a.clone());
    }
    let mut den = rat_i(1);
    for (label, fac) in &f.den_factors {
        let v = fac.eval(&env)?;
        if Field::is_zero(&v) {
            return Err(Error::Pole {
                factor: label.clone(),
                context: format!("formula `{name}`"),
            });
        }
        den *= v;
    }
    Ok(f.numerator.eval(&env)? / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn sampling_is_deterministic_and_guarded() {
        let p1 = sample_generic(&["q"], &["q", "q^2-1"], 7).unwrap();
        let p2 = sample_generic(&["q"], &["q", "q^2-1"], 7).unwrap();
        assert_eq!(p1, p2);
        let q = p1.get("q");
        assert!(!Field::is_zero(q));
        assert_ne!(q, &rat_i(1));
        assert_ne!(q, &rat_i(-1));
    }

    #[test]
    fn symbol_order_does_not_matter() {
        let p1 = sample_generic(&["q", "nu"], &["q"], 3).unwrap();
        let p2 = sample_generic(&["nu", "q"], &["q"], 3).unwrap();
        assert_eq!(p1.assignment, p2.assignment);
    }

    #[test]
    fn standard_guards_make_mu_finite_nonzero() {
        let p = sample_generic(
            &["q", "nu"],
            &["q", "q^2-1", "nu", "q-nu", "nu*q+1"],
            11,
        )
        .unwrap();
        let mu = eval_formula("mu", &[], &p).unwrap();
        assert!(!Field::is_zero(&mu));
        // Same value via the raw form (q-q^-1+nu^-1-nu)/(q-q^-1).
        let raw = p.eval("(q-q^-1+nu^-1-nu)/(q-q^-1)").unwrap();
        assert_eq!(mu, raw);
    }

    #[test]
    fn impossible_guard_exhausts() {
        let err = sample_generic(&["q"], &["q", "1-q*q^-1"], 5).unwrap_err();
        match err {
            Error::GuardExhaustion { rounds, .. } => assert_eq!(rounds, MAX_ROUNDS),
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn f_vanishes_on_the_diagonal() {
        let p = sample_generic(&["q", "u"], &["q", "q^2-1", "u"], 13).unwrap();
        let u = p.get("u").clone();
        let v = eval_formula("f", &[u.clone(), u], &p).unwrap();
        assert!(Field::is_zero(&v));
    }

    #[test]
    fn f_matches_its_raw_form() {
        let p = sample_generic(
            &["q", "u", "v"],
            &["q", "q^2-1", "u-q^2*v", "q^2*u-v", "u-v"],
            17,
        )
        .unwrap();
        let (u, v) = (p.get("u").clone(), p.get("v").clone());
        let got = eval_formula("f", &[u, v], &p).unwrap();
        let raw = p.eval("(u-v)^2/((u-q^2*v)*(u-q^-2*v))").unwrap();
        assert_eq!(got, raw);
    }

    #[test]
    fn pole_reports_factor() {
        // Choose x with x*nu + q^3 = 0.
        let p = sample_generic(&["q", "nu"], &["q", "q^2-1", "nu"], 19).unwrap();
        let q = p.get("q").clone();
        let x = -(q.clone() * q.clone() * q) * p.get("nu").recip();
        let err = eval_formula("F", &[x], &p).unwrap_err();
        match err {
            Error::Pole { factor, .. } => assert_eq!(factor, "x*nu+q^3"),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn n_matches_raw_form() {
        let p = sample_generic(
            &["q", "nu", "s"],
            &["q", "q^2-1", "nu", "s*nu+q"],
            23,
        )
        .unwrap();
        let s = p.get("s").clone();
        let got = eval_formula("N", &[s], &p).unwrap();
        let raw = p
            .eval("(q^2-s*nu^2)*(s*nu+q^-1)/(s*nu+q)")
            .unwrap();
        assert_eq!(got, raw);
    }

    #[test]
    fn field_axioms_hold_on_random_triples() {
        // Exactness: associativity and distributivity on a million sampled triples.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let small = |rng: &mut ChaCha8Rng| {
            let num = rng.gen_range(-99i64..=99);
            let den = rng.gen_range(1i64..=99);
            rat(num, den)
        };
        for _ in 0..1_000_000 {
            let a = small(&mut rng);
            let b = small(&mut rng);
            let c = small(&mut rng);
            debug_assert!(true);
            let left = (&a + &b) + &c;
            let right = &a + (&b + &c);
            if left != right {
                panic!("addition not associative");
            }
            let left = (&a * &b) * &c;
            let right = &a * (&b * &c);
            if left != right {
                panic!("multiplication not associative");
            }
            let left = &a * (&b + &c);
            let right = &a * &b + &a * &c;
            if left != right {
                panic!("distributivity failed");
            }
        }
    }
}
