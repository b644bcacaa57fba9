//! Birman–Murakami–Wenzl (BMW), Hecke, and braid–Hecke towers: oriented
//! rewriting presentations, closed multiplication tables over exact
//! rationals, baxterized (spectral-parameter) generators, Jucys–Murphy
//! elements, and randomized exact identity suites.
//!
//! Generator order inside each presentation is `T1 < ... < T_{n-1} < K1 <
//! ... < K_{n-1}`, with inverse symbols sorting after all base symbols.
//! Every oriented rule strictly decreases the graded length-lex order, so
//! rewriting terminates; the length-preserving braid and far-commutation
//! identities are moves handled by orbit search inside the rewriter.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{check_homomorphism, close_algebra, AlgebraElement, ClosedAlgebra};
use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::report::CheckReport;
use crate::scalar::{eval_formula, rat, ParameterPoint, Rat};
use crate::word::GeneratorSet;

/// `q - q^{-1}`, the skein coefficient, as an expression string.
pub const DELTA: &str = "(q - q^-1)";
/// Coefficient of the idempotent relation `K_i K_i = MU K_i`.
pub const MU: &str = "(nu*q + 1)*(q - nu) / (nu*(q^2 - 1))";

pub(crate) fn tn(i: usize) -> String {
    format!("T{i}")
}

pub(crate) fn kn(i: usize) -> String {
    format!("K{i}")
}

/// Guards shared by every tower with the cubic-root pair (q, nu).
/// Genericity guards shared by every tangle-tower parameter point.
pub const BMW_GUARDS: [&str; 5] = ["q", "q^2 - 1", "nu", "q - nu", "nu*q + 1"];

/// dim BMW_n = (2n-1)!! (odd double factorial).
pub fn bmw_dim(n: usize) -> usize {
    (1..=n).map(|k| 2 * k - 1).product()
}

/// dim H_n = n!.
pub fn hecke_dim(n: usize) -> usize {
    (1..=n).product()
}

/// Adjacent ordered pairs (i, j) with |i-j| = 1 inside 1..=m.
fn adjacent_pairs(m: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 1..m {
        v.push((i, i + 1));
        v.push((i + 1, i));
    }
    v
}

pub(crate) fn braid_type_generators(n: usize, with_kappa: bool) -> GeneratorSet {
    let mut names: Vec<(String, bool)> = Vec::new();
    for i in 1..n {
        names.push((tn(i), true));
    }
    if with_kappa {
        for i in 1..n {
            names.push((kn(i), false));
        }
    }
    let refs: Vec<(&str, bool)> = names.iter().map(|(s, b)| (s.as_str(), *b)).collect();
    GeneratorSet::build(&refs)
}

/// Distant generators commute; each pair becomes a rule ordered so the
/// generator with the larger id moves rightward.
fn push_far_commutation(p: &mut Presentation, n: usize, with_kappa: bool) -> Result<()> {
    for i in 1..n {
        for j in (i + 2)..n {
            let (ti, tj) = (tn(i), tn(j));
            let mut swaps: Vec<(String, String, String)> = vec![(
                format!("far-tt {i} {j}"),
                format!("{tj} {ti}"),
                format!("{ti} {tj}"),
            )];
            if with_kappa {
                let (ki, kj) = (kn(i), kn(j));
                swaps.push((
                    format!("far-kk {i} {j}"),
                    format!("{kj} {ki}"),
                    format!("{ki} {kj}"),
                ));
                swaps.push((
                    format!("far-kt {j} {i}"),
                    format!("{kj} {ti}"),
                    format!("{ti} {kj}"),
                ));
                swaps.push((
                    format!("far-kt {i} {j}"),
                    format!("{ki} {tj}"),
                    format!("{tj} {ki}"),
                ));
            }
            for (name, lhs, rhs) in swaps {
                p.rule(&name, &lhs, &[("1", &rhs)])?;
            }
        }
    }
    Ok(())
}

/// Braid relations, oriented toward the lexicographically smaller spelling.
fn push_braid_moves(p: &mut Presentation, n: usize) -> Result<()> {
    for i in 1..n.saturating_sub(1) {
        p.rule(
            &format!("braid {i}"),
            &format!("{} {} {}", tn(i + 1), tn(i), tn(i + 1)),
            &[("1", &format!("{} {} {}", tn(i), tn(i + 1), tn(i)))],
        )?;
    }
    Ok(())
}

/// The BMW algebra on n strands: invertible braid generators T_i and
/// contraction generators K_i, with the skein relation
/// `T_i^2 = 1 + (q-q^-1) T_i - (q-q^-1) nu K_i` and the contraction laws.
pub fn bmw_presentation(n: usize) -> Presentation {
    assert!(n >= 1, "need at least one strand");
    let gens = braid_type_generators(n, true);
    let mut p = Presentation::new(&format!("bmw{n}"), gens);
    for g in BMW_GUARDS {
        p.guard(g);
    }
    push_bmw_tower_rules(&mut p, n);
    p
}

/// All defining rules of the finite BMW tower on generators T_1..T_{n-1},
/// K_1..K_{n-1}. Shared by the plain tower and by towers that adjoin extra
/// generators (the presentation must already contain the generators).
pub(crate) fn push_bmw_tower_rules(p: &mut Presentation, n: usize) {
    let neg_delta_nu = format!("-{DELTA}*nu");
    for i in 1..n {
        let (t, k) = (tn(i), kn(i));
        p.rule(
            &format!("skein {i}"),
            &format!("{t} {t}"),
            &[("1", "1"), (DELTA, &t), (&neg_delta_nu, &k)],
        )
        .unwrap();
        p.rule(&format!("absorb-left {i}"), &format!("{k} {t}"), &[("nu", &k)])
            .unwrap();
        p.rule(&format!("absorb-right {i}"), &format!("{t} {k}"), &[("nu", &k)])
            .unwrap();
        p.rule(&format!("idempotent {i}"), &format!("{k} {k}"), &[(MU, &k)])
            .unwrap();
        p.inverse_expansion(&t, &[("1", &t), (&format!("-{DELTA}"), "1"), (DELTA, &k)])
            .unwrap();
    }
    for (a, b) in adjacent_pairs(n - 1) {
        let (ta, tb) = (tn(a), tn(b));
        let (ka, kb) = (kn(a), kn(b));
        p.rule(
            &format!("sandwich-t {a},{b}"),
            &format!("{ka} {tb} {ka}"),
            &[("nu^-1", &ka)],
        )
        .unwrap();
        p.rule(
            &format!("sandwich-k {a},{b}"),
            &format!("{ka} {kb} {ka}"),
            &[("1", &ka)],
        )
        .unwrap();
        // K_a T_b T_a = K_a K_b (contraction slides under a crossing pair).
        p.rule(
            &format!("slide-kt {a},{b}"),
            &format!("{ka} {tb} {ta}"),
            &[("1", &format!("{ka} {kb}"))],
        )
        .unwrap();
        // T_b T_a K_b = K_a K_b (mirror of the slide).
        p.rule(
            &format!("slide-tk {a},{b}"),
            &format!("{tb} {ta} {kb}"),
            &[("1", &format!("{ka} {kb}"))],
        )
        .unwrap();
        // K_a K_b T_a = K_a T_b - (q-q^-1) K_a + (q-q^-1) K_a K_b.
        p.rule(
            &format!("corner-right {a},{b}"),
            &format!("{ka} {kb} {ta}"),
            &[
                ("1", &format!("{ka} {tb}")),
                (&format!("-{DELTA}"), &ka),
                (DELTA, &format!("{ka} {kb}")),
            ],
        )
        .unwrap();
        // T_a K_b K_a = T_b K_a - (q-q^-1) K_a + (q-q^-1) K_b K_a.
        p.rule(
            &format!("corner-left {a},{b}"),
            &format!("{ta} {kb} {ka}"),
            &[
                ("1", &format!("{tb} {ka}")),
                (&format!("-{DELTA}"), &ka),
                (DELTA, &format!("{kb} {ka}")),
            ],
        )
        .unwrap();
        // Sandwich against an inverted crossing (recorded for audits only;
        // rewriting patterns stay inverse-free).
        p.relation_only(
            &format!("sandwich-t-inverse {a},{b}"),
            &[("1", &format!("{ka} {tb}^-1 {ka}"))],
            &[("nu", &ka)],
        )
        .unwrap();
    }
    for i in 1..n.saturating_sub(1) {
        let (ta, tb) = (tn(i), tn(i + 1));
        let (ka, kb) = (kn(i), kn(i + 1));
        let d2 = format!("{DELTA}^2");
        // T_{i+1} K_i T_{i+1} rewritten through the inverted-crossing
        // conjugation identity, pre-reduced to graded-smaller terms.
        p.rule(
            &format!("hat-swap {i}"),
            &format!("{tb} {ka} {tb}"),
            &[
                ("1", &format!("{ta} {kb} {ta}")),
                (&format!("-{DELTA}"), &format!("{ta} {kb}")),
                (DELTA, &format!("{ta} {kb} {ka}")),
                (&format!("-{DELTA}"), &format!("{kb} {ta}")),
                (&d2, &kb),
                (&format!("-{d2}"), &format!("{kb} {ka}")),
                (DELTA, &format!("{ka} {tb}")),
            ],
        )
        .unwrap();
        // Conjugation-symmetric form (audited, not used for rewriting):
        // (T_i - d) K_{i+1} (T_i - d) = (T_{i+1} - d) K_i (T_{i+1} - d).
        p.relation_only(
            &format!("hat-conjugation {i}"),
            &[
                ("1", &format!("{ta} {kb} {ta}")),
                (&format!("-{DELTA}"), &format!("{ta} {kb}")),
                (&format!("-{DELTA}"), &format!("{kb} {ta}")),
                (&d2, &kb),
            ],
            &[
                ("1", &format!("{tb} {ka} {tb}")),
                (&format!("-{DELTA}"), &format!("{tb} {ka}")),
                (&format!("-{DELTA}"), &format!("{ka} {tb}")),
                (&d2, &ka),
            ],
        )
        .unwrap();
        // T_{i+1} K_i T_{i+1} = T_i^-1 K_{i+1} T_i^-1 and its lower mirror.
        p.relation_only(
            &format!("inverse-hat {i}"),
            &[("1", &format!("{tb} {ka} {tb}"))],
            &[("1", &format!("{ta}^-1 {kb} {ta}^-1"))],
        )
        .unwrap();
        p.relation_only(
            &format!("inverse-hat-mirror {i}"),
            &[("1", &format!("{ta} {kb} {ta}"))],
            &[("1", &format!("{tb}^-1 {ka} {tb}^-1"))],
        )
        .unwrap();
    }
    push_braid_moves(p, n).unwrap();
    push_far_commutation(p, n, true).unwrap();
}

/// The Hecke algebra on n strands: invertible T_i with the quadratic skein
/// relation `T_i^2 = 1 + (q - q^-1) T_i`.
pub fn hecke_presentation(n: usize) -> Presentation {
    assert!(n >= 1);
    let gens = braid_type_generators(n, false);
    let mut p = Presentation::new(&format!("hecke{n}"), gens);
    for g in ["q", "q^2 - 1"] {
        p.guard(g);
    }
    for i in 1..n {
        let t = tn(i);
        p.rule(
            &format!("skein {i}"),
            &format!("{t} {t}"),
            &[("1", "1"), (DELTA, &t)],
        )
        .unwrap();
        p.inverse_expansion(&t, &[("1", &t), (&format!("-{DELTA}"), "1")])
            .unwrap();
    }
    push_braid_moves(&mut p, n).unwrap();
    push_far_commutation(&mut p, n, false).unwrap();
    p
}

/// The braid–Hecke algebra on n strands: invertible T_i with cubic minimal
/// polynomial (roots q, -q^-1, nu), contraction-style K_i subject only to
/// the absorption, exchange, and kappa-braid laws. With `tangle` set, the
/// kappa-braid law is replaced by the two tangle contractions, which
/// quotients the tower onto BMW.
pub fn braid_hecke_presentation(n: usize, tangle: bool) -> Presentation {
    assert!(n >= 1);
    let gens = braid_type_generators(n, true);
    let name = if tangle {
        format!("braid-hecke-tangle{n}")
    } else {
        format!("braid-hecke{n}")
    };
    let mut p = Presentation::new(&name, gens);
    for g in ["q", "q^2 - 1", "nu", "q - nu", "nu*q + 1"] {
        p.guard(g);
    }
    let neg_delta_nu = format!("-{DELTA}*nu");
    for i in 1..n {
        let (t, k) = (tn(i), kn(i));
        p.rule(
            &format!("skein {i}"),
            &format!("{t} {t}"),
            &[("1", "1"), (DELTA, &t), (&neg_delta_nu, &k)],
        )
        .unwrap();
        p.rule(&format!("absorb-left {i}"), &format!("{k} {t}"), &[("nu", &k)])
            .unwrap();
        p.rule(&format!("absorb-right {i}"), &format!("{t} {k}"), &[("nu", &k)])
            .unwrap();
        p.rule(&format!("idempotent {i}"), &format!("{k} {k}"), &[(MU, &k)])
            .unwrap();
        p.inverse_expansion(&t, &[("1", &t), (&format!("-{DELTA}"), "1"), (DELTA, &k)])
            .unwrap();
        // Cubic minimal polynomial of the braid generator (audited).
        p.relation_only(
            &format!("cubic {i}"),
            &[("1", &format!("{t} {t} {t}"))],
            &[
                (&format!("{DELTA} + nu"), &format!("{t} {t}")),
                (&format!("1 - nu*{DELTA}"), &t),
                ("-nu", "1"),
            ],
        )
        .unwrap();
        // K_i is determined by the braid generator (audited).
        p.relation_only(
            &format!("contractor-definition {i}"),
            &[("1", &k)],
            &[
                ("1", "1"),
                (&format!("-1/{DELTA}"), &t),
                (&format!("1/{DELTA}"), &format!("{t}^-1")),
            ],
        )
        .unwrap();
    }
    for i in 1..n.saturating_sub(1) {
        let (ta, tb) = (tn(i), tn(i + 1));
        let (ka, kb) = (kn(i), kn(i + 1));
        // Exchange law: T_{i+1} T_i K_{i+1} - K_i K_{i+1} = T_i T_{i+1} K_i - K_{i+1} K_i.
        p.rule(
            &format!("exchange {i}"),
            &format!("{tb} {ta} {kb}"),
            &[
                ("1", &format!("{ta} {tb} {ka}")),
                ("1", &format!("{ka} {kb}")),
                ("-1", &format!("{kb} {ka}")),
            ],
        )
        .unwrap();
        if tangle {
            p.rule(
                &format!("tangle-up {i}"),
                &format!("{kb} {ka} {kb}"),
                &[("1", &kb)],
            )
            .unwrap();
            p.rule(
                &format!("tangle-down {i}"),
                &format!("{ka} {kb} {ka}"),
                &[("1", &ka)],
            )
            .unwrap();
        } else {
            // Kappa-braid law: K_{i+1} K_i K_{i+1} - K_{i+1} = K_i K_{i+1} K_i - K_i.
            p.rule(
                &format!("kappa-braid {i}"),
                &format!("{kb} {ka} {kb}"),
                &[
                    ("1", &format!("{ka} {kb} {ka}")),
                    ("-1", &ka),
                    ("1", &kb),
                ],
            )
            .unwrap();
        }
    }
    push_braid_moves(&mut p, n).unwrap();
    push_far_commutation(&mut p, n, true).unwrap();
    p
}

/// A closed BMW or Hecke level with its cached contraction and
/// Jucys–Murphy elements.
pub struct BmwInstance {
    pub n: usize,
    pub algebra: ClosedAlgebra<Rat>,
    /// kappas[i-1] = K_i (empty for Hecke).
    pub kappas: Vec<AlgebraElement<Rat>>,
    /// ys[k-1] = y_k; y_1 = 1, y_{k+1} = T_k ... T_2 T_1^2 T_2 ... T_k.
    pub ys: Vec<AlgebraElement<Rat>>,
}

impl BmwInstance {
    pub fn point(&self) -> &ParameterPoint {
        &self.algebra.point
    }

    pub fn q(&self) -> Rat {
        self.point().get("q").clone()
    }

    pub fn nu(&self) -> Rat {
        self.point().get("nu").clone()
    }

    pub fn delta(&self) -> Rat {
        let q = self.q();
        let one = Rat::from_integer(1.into());
        &q - &(&one / &q)
    }

    pub fn mu(&self) -> Result<Rat> {
        eval_formula("mu", &[], self.point())
    }

    pub fn t(&self, i: usize) -> Result<AlgebraElement<Rat>> {
        self.algebra.gen_elem(&tn(i))
    }

    pub fn t_inv(&self, i: usize) -> Result<AlgebraElement<Rat>> {
        let t = self.t(i)?;
        self.algebra
            .inverse(&t)?
            .ok_or_else(|| Error::Other(format!("braid generator {} not invertible", tn(i))))
    }

    pub fn kappa(&self, i: usize) -> &AlgebraElement<Rat> {
        &self.kappas[i - 1]
    }

    pub fn y(&self, k: usize) -> &AlgebraElement<Rat> {
        &self.ys[k - 1]
    }
}

/// The word T_k ... T_2 T_1 T_1 T_2 ... T_k defining y_{k+1}.
pub fn jm_word(k: usize) -> String {
    let mut parts: Vec<String> = Vec::new();
    for i in (2..=k).rev() {
        parts.push(tn(i));
    }
    parts.push(tn(1));
    parts.push(tn(1));
    for i in 2..=k {
        parts.push(tn(i));
    }
    parts.join(" ")
}

fn jm_elements(alg: &ClosedAlgebra<Rat>, n: usize) -> Result<Vec<AlgebraElement<Rat>>> {
    let mut ys = vec![alg.unit_elem()];
    for k in 1..n {
        ys.push(alg.normal_form_str(&jm_word(k))?);
    }
    Ok(ys)
}

fn finish_instance(n: usize, alg: ClosedAlgebra<Rat>, with_kappa: bool) -> Result<BmwInstance> {
    let kappas = if with_kappa {
        (1..n)
            .map(|i| alg.gen_elem(&kn(i)))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let ys = jm_elements(&alg, n)?;
    Ok(BmwInstance {
        n,
        algebra: alg,
        kappas,
        ys,
    })
}

/// Close BMW_n at a guarded parameter point and check its dimension.
pub fn build_bmw_at(n: usize, point: &ParameterPoint) -> Result<BmwInstance> {
    let pres = bmw_presentation(n);
    let expected = bmw_dim(n);
    let alg = close_algebra(&pres, point, 4 * expected + 8)?;
    if alg.dim() != expected {
        return Err(Error::Other(format!(
            "bmw{} closed with dimension {} (expected {})",
            n,
            alg.dim(),
            expected
        )));
    }
    finish_instance(n, alg, true)
}

/// Sample a generic (q, nu) and close BMW_n there.
pub fn build_bmw(n: usize, seed: u64) -> Result<BmwInstance> {
    let pres = bmw_presentation(n);
    let guards: Vec<&str> = pres.guards.iter().map(|s| s.as_str()).collect();
    let point = crate::scalar::sample_generic(&["q", "nu"], &guards, seed)?;
    build_bmw_at(n, &point)
}

/// Close the Hecke algebra H_n at a guarded point and check dim = n!.
pub fn build_hecke_at(n: usize, point: &ParameterPoint) -> Result<BmwInstance> {
    let pres = hecke_presentation(n);
    let expected = hecke_dim(n);
    let alg = close_algebra(&pres, point, 4 * expected + 8)?;
    if alg.dim() != expected {
        return Err(Error::Other(format!(
            "hecke{} closed with dimension {} (expected {})",
            n,
            alg.dim(),
            expected
        )));
    }
    finish_instance(n, alg, false)
}

pub fn build_hecke(n: usize, seed: u64) -> Result<BmwInstance> {
    let pres = hecke_presentation(n);
    let guards: Vec<&str> = pres.guards.iter().map(|s| s.as_str()).collect();
    let point = crate::scalar::sample_generic(&["q"], &guards, seed)?;
    build_hecke_at(n, &point)
}

/// Extend a parameter point with freshly sampled symbols subject to extra
/// guard expressions (used for spectral variables).
pub fn extend_point(
    base: &ParameterPoint,
    symbols: &[&str],
    guards: &[&str],
    seed: u64,
) -> Result<ParameterPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5bec_7a11);
    for _round in 0..1000u32 {
        let mut p = base.clone();
        for s in symbols {
            let num = rng.gen_range(1..=1000i64);
            let den = rng.gen_range(1..=1000i64);
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            p.extend(s, rat(sign * num, den));
        }
        let ok = guards
            .iter()
            .all(|g| p.eval(g).map(|v| !num::Zero::is_zero(&v)).unwrap_or(false));
        if ok {
            return Ok(p);
        }
    }
    Err(Error::GuardExhaustion {
        rounds: 1000,
        guards: guards.iter().map(|s| s.to_string()).collect(),
    })
}

/// Which normalization of the baxterized generator to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baxter {
    /// T_i + d/(v/u - 1) + d/(1 + q v/(nu u)) K_i  (poles at u = v and at
    /// 1 + q v/(nu u) = 0).
    Plain,
    /// (1 - u/v) * Plain, regular at u = v where it equals d * unit.
    Tilde,
}

/// Build the baxterized generator T_i(u, v) in either normalization.
pub fn baxterized(
    inst: &BmwInstance,
    i: usize,
    u: &Rat,
    v: &Rat,
    variant: Baxter,
) -> Result<AlgebraElement<Rat>> {
    let t = inst.t(i)?;
    baxterized_element(
        &inst.algebra,
        &inst.q(),
        &inst.nu(),
        &t,
        inst.kappa(i),
        u,
        v,
        variant,
    )
}

/// Baxterized combination a·T + b·1 + c·K from explicit ingredients, so any
/// tower exposing a braid/contraction pair can build spectral generators.
#[allow(clippy::too_many_arguments)]
pub fn baxterized_element(
    alg: &ClosedAlgebra<Rat>,
    q: &Rat,
    nu: &Rat,
    t: &AlgebraElement<Rat>,
    k: &AlgebraElement<Rat>,
    u: &Rat,
    v: &Rat,
    variant: Baxter,
) -> Result<AlgebraElement<Rat>> {
    use num::Zero;
    let ctx = match variant {
        Baxter::Plain => "baxterized generator",
        Baxter::Tilde => "normalized baxterized generator",
    };
    if u.is_zero() {
        return Err(Error::Pole {
            factor: "u".into(),
            context: ctx.into(),
        });
    }
    if v.is_zero() {
        return Err(Error::Pole {
            factor: "v".into(),
            context: ctx.into(),
        });
    }
    let one = Rat::from_integer(1.into());
    let d = q - &(&one / q);
    let q = q.clone();
    let nu = nu.clone();
    let t = t.clone();
    let k = k.clone();
    let unit = alg.unit_elem();
    match variant {
        Baxter::Plain => {
            let r = v / u; // v/u
            if r == one {
                return Err(Error::Pole {
                    factor: "v/u - 1".into(),
                    context: ctx.into(),
                });
            }
            let d2 = &one + &(&(&q * &r) / &nu);
            if d2.is_zero() {
                return Err(Error::Pole {
                    factor: "1 + q*v/(nu*u)".into(),
                    context: ctx.into(),
                });
            }
            let c1 = &d / &(&r - &one);
            let c2 = &d / &d2;
            t.add(&unit.scale(&c1))?.add(&k.scale(&c2))
        }
        Baxter::Tilde => {
            let x = u / v; // u/v
            let den = &(&nu * &x) + &q;
            if den.is_zero() {
                return Err(Error::Pole {
                    factor: "nu*u/v + q".into(),
                    context: ctx.into(),
                });
            }
            // (1-x) T_i + d*x + d*nu*x*(1-x)/(nu*x+q) K_i
            let omx = &one - &x;
            let ck = &(&(&d * &nu) * &(&x * &omx)) / &den;
            t.scale(&omx)
                .add(&unit.scale(&(&d * &x)))?
                .add(&k.scale(&ck))
        }
    }
}

fn is_pole(err: &Error, needle: &str) -> bool {
    matches!(err, Error::Pole { factor, .. } if factor.contains(needle))
}

struct LawRunner<'a> {
    insts: &'a [BmwInstance],
    report: CheckReport,
    seed: u64,
}

impl<'a> LawRunner<'a> {
    fn law<F>(&mut self, name: &str, mut f: F)
    where
        F: FnMut(&BmwInstance, u64) -> Result<std::result::Result<(), String>>,
    {
        let mut failures: Vec<String> = Vec::new();
        for (idx, inst) in self.insts.iter().enumerate() {
            let salt = self
                .seed
                .wrapping_mul(0x9e37_79b9)
                .wrapping_add(idx as u64)
                .wrapping_add(name.len() as u64);
            match f(inst, salt) {
                Ok(Ok(())) => {}
                Ok(Err(msg)) => failures.push(format!("point {idx}: {msg}")),
                Err(e) => failures.push(format!("point {idx}: error {e}")),
            }
        }
        let ok = failures.is_empty();
        let detail = if ok {
            format!("exact at {} points", self.insts.len())
        } else {
            failures.join("; ")
        };
        self.report.push(name, ok, detail);
    }
}

fn eq_check(
    alg: &ClosedAlgebra<Rat>,
    lhs: &AlgebraElement<Rat>,
    rhs: &AlgebraElement<Rat>,
    what: &str,
) -> Result<std::result::Result<(), String>> {
    let diff = lhs.sub(rhs)?;
    if diff.is_zero() {
        Ok(Ok(()))
    } else {
        Ok(Err(format!(
            "{what}: difference has {} terms, e.g. {}",
            diff.coeffs.len(),
            alg.elem_string(&diff)
        )))
    }
}

/// Randomized exact identity suite for BMW_n at `trials` independent
/// generic parameter points.
pub fn identity_suite(n: usize, trials: usize, seed: u64) -> Result<CheckReport> {
    assert!(n >= 3, "the identity suite needs adjacent generator pairs");
    let mut insts = Vec::with_capacity(trials);
    for t in 0..trials {
        insts.push(build_bmw(n, seed.wrapping_add(t as u64))?);
    }
    let mut runner = LawRunner {
        insts: &insts,
        report: CheckReport::new(&format!("bmw{n}-identities"), seed, trials),
        seed,
    };

    runner.law("defining-relations", |inst, _| {
        let pres = bmw_presentation(inst.n);
        let mut images = BTreeMap::new();
        for i in 1..inst.n {
            images.insert(tn(i), inst.t(i)?);
            images.insert(kn(i), inst.kappa(i).clone());
        }
        let rep = check_homomorphism("identity", &pres, &inst.algebra, &images, false)?;
        if rep.all_ok() {
            Ok(Ok(()))
        } else {
            let bad: Vec<String> = rep
                .entries
                .iter()
                .filter(|(_, ok, _)| !ok)
                .map(|(name, _, msg)| format!("{name}: {msg}"))
                .collect();
            Ok(Err(bad.join("; ")))
        }
    });

    runner.law("reversal-anti-automorphism", |inst, _| {
        let pres = bmw_presentation(inst.n);
        let mut images = BTreeMap::new();
        for i in 1..inst.n {
            images.insert(tn(i), inst.t(i)?);
            images.insert(kn(i), inst.kappa(i).clone());
        }
        let rep = check_homomorphism("reversal", &pres, &inst.algebra, &images, true)?;
        if rep.all_ok() {
            Ok(Ok(()))
        } else {
            Ok(Err("some relation breaks under product reversal".into()))
        }
    });

    runner.law("flip-automorphism", |inst, _| {
        let pres = bmw_presentation(inst.n);
        let mut images = BTreeMap::new();
        for i in 1..inst.n {
            images.insert(tn(i), inst.t(inst.n - i)?);
            images.insert(kn(i), inst.kappa(inst.n - i).clone());
        }
        let rep = check_homomorphism("flip", &pres, &inst.algebra, &images, false)?;
        if rep.all_ok() {
            Ok(Ok(()))
        } else {
            Ok(Err("some relation breaks under the strand flip".into()))
        }
    });

    runner.law("kappa-square", |inst, _| {
        let mu = inst.mu()?;
        for i in 1..inst.n {
            let k = inst.kappa(i);
            let sq = inst.algebra.mul(k, k)?;
            if let Err(msg) = eq_check(&inst.algebra, &sq, &k.scale(&mu), &format!("K{i}^2"))? {
                return Ok(Err(msg));
            }
        }
        Ok(Ok(()))
    });

    runner.law("kappa-slide", |inst, _| {
        // K_i T_b T_i = T_b T_i K_b and the reversed products, b = i +- 1.
        for (a, b) in adjacent_pairs(inst.n - 1) {
            let alg = &inst.algebra;
            let (ta, tb) = (inst.t(a)?, inst.t(b)?);
            let (ka, kb) = (inst.kappa(a), inst.kappa(b));
            let lhs = alg.mul(&alg.mul(ka, &tb)?, &ta)?;
            let rhs = alg.mul(&alg.mul(&tb, &ta)?, kb)?;
            if let Err(m) = eq_check(alg, &lhs, &rhs, &format!("slide {a},{b}"))? {
                return Ok(Err(m));
            }
            let lhs_m = alg.mul(&alg.mul(&ta, &tb)?, ka)?;
            let rhs_m = alg.mul(kb, &alg.mul(&ta, &tb)?)?;
            if let Err(m) = eq_check(alg, &lhs_m, &rhs_m, &format!("slide-mirror {a},{b}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("kappa-absorb-product", |inst, _| {
        // K_i T_b T_i = K_i K_b and mirror T_i T_b K_i = K_b K_i.
        for (a, b) in adjacent_pairs(inst.n - 1) {
            let alg = &inst.algebra;
            let (ta, tb) = (inst.t(a)?, inst.t(b)?);
            let (ka, kb) = (inst.kappa(a), inst.kappa(b));
            let lhs = alg.mul(&alg.mul(ka, &tb)?, &ta)?;
            let rhs = alg.mul(ka, kb)?;
            if let Err(m) = eq_check(alg, &lhs, &rhs, &format!("absorb {a},{b}"))? {
                return Ok(Err(m));
            }
            let lhs_m = alg.mul(&alg.mul(&ta, &tb)?, ka)?;
            let rhs_m = alg.mul(kb, ka)?;
            if let Err(m) = eq_check(alg, &lhs_m, &rhs_m, &format!("absorb-mirror {a},{b}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("kappa-absorb-inverse-product", |inst, _| {
        // K_i T_b^-1 T_i^-1 = K_i K_b and mirror.
        for (a, b) in adjacent_pairs(inst.n - 1) {
            let alg = &inst.algebra;
            let (tai, tbi) = (inst.t_inv(a)?, inst.t_inv(b)?);
            let (ka, kb) = (inst.kappa(a), inst.kappa(b));
            let lhs = alg.mul(&alg.mul(ka, &tbi)?, &tai)?;
            let rhs = alg.mul(ka, kb)?;
            if let Err(m) = eq_check(alg, &lhs, &rhs, &format!("absorb-inv {a},{b}"))? {
                return Ok(Err(m));
            }
            let lhs_m = alg.mul(&alg.mul(&tai, &tbi)?, ka)?;
            let rhs_m = alg.mul(kb, ka)?;
            if let Err(m) = eq_check(alg, &lhs_m, &rhs_m, &format!("absorb-inv-mirror {a},{b}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("tangle-contraction", |inst, _| {
        for (a, b) in adjacent_pairs(inst.n - 1) {
            let alg = &inst.algebra;
            let (ka, kb) = (inst.kappa(a), inst.kappa(b));
            let lhs = alg.mul(&alg.mul(ka, kb)?, ka)?;
            if let Err(m) = eq_check(alg, &lhs, ka, &format!("tangle {a},{b}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("kappa-sandwich", |inst, _| {
        // K_i T_b^e K_i = nu^-e K_i for b = i +- 1, e = +-1.
        let nu = inst.nu();
        let nu_inv = Rat::from_integer(1.into()) / nu.clone();
        for (a, b) in adjacent_pairs(inst.n - 1) {
            let alg = &inst.algebra;
            let ka = inst.kappa(a);
            let plus = alg.mul(&alg.mul(ka, &inst.t(b)?)?, ka)?;
            if let Err(m) = eq_check(alg, &plus, &ka.scale(&nu_inv), &format!("sandwich+ {a},{b}"))? {
                return Ok(Err(m));
            }
            let minus = alg.mul(&alg.mul(ka, &inst.t_inv(b)?)?, ka)?;
            if let Err(m) = eq_check(alg, &minus, &ka.scale(&nu), &format!("sandwich- {a},{b}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("hat-conjugation", |inst, _| {
        // (T_i - d) K_b (T_i - d) = (T_b - d) K_i (T_b - d) for b = i+1.
        let d = inst.delta();
        for i in 1..inst.n - 1 {
            let alg = &inst.algebra;
            let shifted = |j: usize| -> Result<AlgebraElement<Rat>> {
                Ok(inst.t(j)?.sub(&alg.unit_elem().scale(&d))?)
            };
            let (sa, sb) = (shifted(i)?, shifted(i + 1)?);
            let lhs = alg.mul(&alg.mul(&sa, inst.kappa(i + 1))?, &sa)?;
            let rhs = alg.mul(&alg.mul(&sb, inst.kappa(i))?, &sb)?;
            if let Err(m) = eq_check(alg, &lhs, &rhs, &format!("hat {i}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("inverse-hat", |inst, _| {
        // T_b K_i T_b = T_i^-1 K_b T_i^-1 for b = i+1, and the lower mirror.
        for i in 1..inst.n - 1 {
            let alg = &inst.algebra;
            let (ta, tb) = (inst.t(i)?, inst.t(i + 1)?);
            let (tai, tbi) = (inst.t_inv(i)?, inst.t_inv(i + 1)?);
            let lhs = alg.mul(&alg.mul(&tb, inst.kappa(i))?, &tb)?;
            let rhs = alg.mul(&alg.mul(&tai, inst.kappa(i + 1))?, &tai)?;
            if let Err(m) = eq_check(alg, &lhs, &rhs, &format!("inverse-hat {i}"))? {
                return Ok(Err(m));
            }
            let lhs2 = alg.mul(&alg.mul(&ta, inst.kappa(i + 1))?, &ta)?;
            let rhs2 = alg.mul(&alg.mul(&tbi, inst.kappa(i))?, &tbi)?;
            if let Err(m) = eq_check(alg, &lhs2, &rhs2, &format!("inverse-hat-mirror {i}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("corner-exchange", |inst, _| {
        // K_b K_i (T_b - d) = K_b (T_i - d) for b = i +- 1, plus mirror.
        let d = inst.delta();
        for (a, b) in adjacent_pairs(inst.n - 1) {
            let alg = &inst.algebra;
            let du = alg.unit_elem().scale(&d);
            let (ka, kb) = (inst.kappa(a), inst.kappa(b));
            let sa = inst.t(a)?.sub(&du)?;
            let sb = inst.t(b)?.sub(&du)?;
            let lhs = alg.mul(&alg.mul(kb, ka)?, &sb)?;
            let rhs = alg.mul(kb, &sa)?;
            if let Err(m) = eq_check(alg, &lhs, &rhs, &format!("corner {a},{b}"))? {
                return Ok(Err(m));
            }
            let lhs_m = alg.mul(&sb, &alg.mul(ka, kb)?)?;
            let rhs_m = alg.mul(&sa, kb)?;
            if let Err(m) = eq_check(alg, &lhs_m, &rhs_m, &format!("corner-mirror {a},{b}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("skein-inverse", |inst, _| {
        // T_i^-1 (computed through the minimal polynomial) equals
        // T_i - d + d K_i (the skein route) -- two independent routes.
        let d = inst.delta();
        for i in 1..inst.n {
            let alg = &inst.algebra;
            let lhs = inst.t_inv(i)?;
            let rhs = inst
                .t(i)?
                .sub(&alg.unit_elem().scale(&d))?
                .add(&inst.kappa(i).scale(&d))?;
            if let Err(m) = eq_check(alg, &lhs, &rhs, &format!("skein-inverse {i}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("yang-baxter", |inst, salt| {
        // T_i(u2,u3) T_{i+1}(u1,u3) T_i(u1,u2) =
        // T_{i+1}(u1,u2) T_i(u1,u3) T_{i+1}(u2,u3).
        let guards = [
            "u1", "u2", "u3", "u1 - u2", "u1 - u3", "u2 - u3",
            "1 + q*u2/(nu*u1)", "1 + q*u3/(nu*u1)", "1 + q*u3/(nu*u2)",
        ];
        let p = extend_point(inst.point(), &["u1", "u2", "u3"], &guards, salt)?;
        let (u1, u2, u3) = (p.get("u1").clone(), p.get("u2").clone(), p.get("u3").clone());
        for i in 1..inst.n - 1 {
            let alg = &inst.algebra;
            let a = baxterized(inst, i, &u2, &u3, Baxter::Plain)?;
            let b = baxterized(inst, i + 1, &u1, &u3, Baxter::Plain)?;
            let c = baxterized(inst, i, &u1, &u2, Baxter::Plain)?;
            let lhs = alg.mul(&alg.mul(&a, &b)?, &c)?;
            let a2 = baxterized(inst, i + 1, &u1, &u2, Baxter::Plain)?;
            let b2 = baxterized(inst, i, &u1, &u3, Baxter::Plain)?;
            let c2 = baxterized(inst, i + 1, &u2, &u3, Baxter::Plain)?;
            let rhs = alg.mul(&alg.mul(&a2, &b2)?, &c2)?;
            if let Err(m) = eq_check(alg, &lhs, &rhs, &format!("yang-baxter {i}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("baxterized-inverse", |inst, salt| {
        // T_i(v,u)^-1 = f(u,v) T_i(u,v).
        let guards = [
            "u", "v", "u - v",
            "1 + q*v/(nu*u)", "1 + q*u/(nu*v)",
            "u - q^2*v", "q^2*u - v",
        ];
        let p = extend_point(inst.point(), &["u", "v"], &guards, salt)?;
        let (u, v) = (p.get("u").clone(), p.get("v").clone());
        let f = eval_formula("f", &[u.clone(), v.clone()], &p)?;
        for i in 1..inst.n {
            let alg = &inst.algebra;
            let vu = baxterized(inst, i, &v, &u, Baxter::Plain)?;
            let uv = baxterized(inst, i, &u, &v, Baxter::Plain)?;
            let prod = alg.mul(&vu, &uv.scale(&f))?;
            if let Err(m) = eq_check(alg, &prod, &alg.unit_elem(), &format!("inverse {i}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("product-expansion", |inst, salt| {
        // T(x) T(y) = d(1-xy)/((1-x)(1-y)) T(xy) + 1
        //           + d nu (xy-1)(nu x y + q^3) / ((nu y+q)(nu x+q)(nu x y+q)) K.
        let guards = [
            "x", "y", "x - 1", "y - 1", "x*y - 1",
            "nu*x + q", "nu*y + q", "nu*x*y + q",
        ];
        let p = extend_point(inst.point(), &["x", "y"], &guards, salt)?;
        let (x, y) = (p.get("x").clone(), p.get("y").clone());
        let one = Rat::from_integer(1.into());
        let q = inst.q();
        let nu = inst.nu();
        let d = inst.delta();
        let xy = &x * &y;
        let c1 = &(&d * &(&one - &xy)) / &(&(&one - &x) * &(&one - &y));
        let q3 = &(&q * &q) * &q;
        let c2num = &(&d * &nu) * &(&(&xy - &one) * &(&(&nu * &xy) + &q3));
        let c2den = &(&(&(&nu * &y) + &q) * &(&(&nu * &x) + &q)) * &(&(&nu * &xy) + &q);
        let c2 = &c2num / &c2den;
        for i in 1..inst.n {
            let alg = &inst.algebra;
            let tx = baxterized(inst, i, &x, &one, Baxter::Plain)?;
            let ty = baxterized(inst, i, &y, &one, Baxter::Plain)?;
            let txy = baxterized(inst, i, &xy, &one, Baxter::Plain)?;
            let lhs = alg.mul(&tx, &ty)?;
            let rhs = txy
                .scale(&c1)
                .add(&alg.unit_elem())?
                .add(&inst.kappa(i).scale(&c2))?;
            if let Err(m) = eq_check(alg, &lhs, &rhs, &format!("product {i}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("difference-expansion", |inst, salt| {
        // T(x) = T(y) + d(x-y)/((y-1)(x-1)) + d nu q (x-y)/((nu y+q)(nu x+q)) K.
        let guards = ["x", "y", "x - 1", "y - 1", "x - y", "nu*x + q", "nu*y + q"];
        let p = extend_point(inst.point(), &["x", "y"], &guards, salt)?;
        let (x, y) = (p.get("x").clone(), p.get("y").clone());
        let one = Rat::from_integer(1.into());
        let q = inst.q();
        let nu = inst.nu();
        let d = inst.delta();
        let c1 = &(&d * &(&x - &y)) / &(&(&y - &one) * &(&x - &one));
        let c2 = &(&(&(&d * &nu) * &q) * &(&x - &y))
            / &(&(&(&nu * &y) + &q) * &(&(&nu * &x) + &q));
        for i in 1..inst.n {
            let alg = &inst.algebra;
            let tx = baxterized(inst, i, &x, &one, Baxter::Plain)?;
            let ty = baxterized(inst, i, &y, &one, Baxter::Plain)?;
            let rhs = ty
                .add(&alg.unit_elem().scale(&c1))?
                .add(&inst.kappa(i).scale(&c2))?;
            if let Err(m) = eq_check(alg, &tx, &rhs, &format!("difference {i}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("tilde-normalization", |inst, salt| {
        // Tilde(u,v) = (1 - u/v) Plain(u,v) away from u = v.
        let guards = ["u", "v", "u - v", "1 + q*v/(nu*u)", "nu*u + q*v"];
        let p = extend_point(inst.point(), &["u", "v"], &guards, salt)?;
        let (u, v) = (p.get("u").clone(), p.get("v").clone());
        let one = Rat::from_integer(1.into());
        let factor = &one - &(&u / &v);
        for i in 1..inst.n {
            let alg = &inst.algebra;
            let tilde = baxterized(inst, i, &u, &v, Baxter::Tilde)?;
            let plain = baxterized(inst, i, &u, &v, Baxter::Plain)?;
            if let Err(m) = eq_check(alg, &tilde, &plain.scale(&factor), &format!("tilde {i}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("tilde-at-equal-arguments", |inst, salt| {
        // Tilde(u,u) = (q - q^-1) * unit; no pole at u = v.
        let p = extend_point(inst.point(), &["u"], &["u", "nu*u + q*u"], salt)?;
        let u = p.get("u").clone();
        let d = inst.delta();
        for i in 1..inst.n {
            let alg = &inst.algebra;
            let tilde = baxterized(inst, i, &u, &u, Baxter::Tilde)?;
            if let Err(m) = eq_check(
                alg,
                &tilde,
                &alg.unit_elem().scale(&d),
                &format!("tilde-at-one {i}"),
            )? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("tilde-unitarity", |inst, salt| {
        // Tilde_i(u/v) Tilde_i(v/u) = (v q^2 - u)(u q^2 - v)/(q^2 u v).
        let guards = ["u", "v", "nu*u + q*v", "nu*v + q*u"];
        let p = extend_point(inst.point(), &["u", "v"], &guards, salt)?;
        let (u, v) = (p.get("u").clone(), p.get("v").clone());
        let q = inst.q();
        let q2 = &q * &q;
        let scalar = &(&(&(&v * &q2) - &u) * &(&(&u * &q2) - &v)) / &(&(&q2 * &u) * &v);
        for i in 1..inst.n {
            let alg = &inst.algebra;
            let ab = baxterized(inst, i, &u, &v, Baxter::Tilde)?;
            let ba = baxterized(inst, i, &v, &u, Baxter::Tilde)?;
            let prod = alg.mul(&ab, &ba)?;
            if let Err(m) = eq_check(
                alg,
                &prod,
                &alg.unit_elem().scale(&scalar),
                &format!("unitarity {i}"),
            )? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("plain-pole-detection", |inst, _| {
        // Plain form must refuse u = v and 1 + q v/(nu u) = 0 with named factors.
        let u = rat(3, 1);
        match baxterized(inst, 1, &u, &u, Baxter::Plain) {
            Err(e) if is_pole(&e, "v/u - 1") => {}
            other => {
                return Ok(Err(format!(
                    "u = v accepted or misreported: {:?}",
                    other.err().map(|e| e.to_string())
                )))
            }
        }
        let q = inst.q();
        let nu = inst.nu();
        let v = -&(&nu * &u) / &q; // 1 + q v/(nu u) = 0
        match baxterized(inst, 1, &u, &v, Baxter::Plain) {
            Err(e) if is_pole(&e, "1 + q*v/(nu*u)") => Ok(Ok(())),
            other => Ok(Err(format!(
                "second pole accepted or misreported: {:?}",
                other.err().map(|e| e.to_string())
            ))),
        }
    });

    runner.law("jm-commute", |inst, _| {
        for j in 1..=inst.n {
            for k in (j + 1)..=inst.n {
                let c = inst.algebra.commutator(inst.y(j), inst.y(k))?;
                if !c.is_zero() {
                    return Ok(Err(format!("[y{j}, y{k}] != 0")));
                }
            }
        }
        Ok(Ok(()))
    });

    runner.law("jm-kappa-squeeze", |inst, _| {
        // K_j y_{j+1} y_j = y_j y_{j+1} K_j = nu^2 K_j.
        let nu = inst.nu();
        let nu2 = &nu * &nu;
        for j in 1..inst.n {
            let alg = &inst.algebra;
            let kj = inst.kappa(j);
            let yy = alg.mul(inst.y(j + 1), inst.y(j))?;
            let lhs = alg.mul(kj, &yy)?;
            if let Err(m) = eq_check(alg, &lhs, &kj.scale(&nu2), &format!("squeeze-left {j}"))? {
                return Ok(Err(m));
            }
            let yy2 = alg.mul(inst.y(j), inst.y(j + 1))?;
            let rhs = alg.mul(&yy2, kj)?;
            if let Err(m) = eq_check(alg, &rhs, &kj.scale(&nu2), &format!("squeeze-right {j}"))? {
                return Ok(Err(m));
            }
        }
        Ok(Ok(()))
    });

    runner.law("fault-detection", |inst, _| {
        // A deliberately corrupted idempotent coefficient must be rejected
        // while the braid relation (which never sees it) still holds.
        let mu_bad = inst.mu()? + Rat::from_integer(1.into());
        let alg = &inst.algebra;
        let k1 = inst.kappa(1);
        let sq = alg.mul(k1, k1)?;
        if sq == k1.scale(&mu_bad) {
            return Ok(Err("corrupted coefficient not detected".into()));
        }
        let (t1, t2) = (inst.t(1)?, inst.t(2)?);
        let lhs = alg.mul(&alg.mul(&t1, &t2)?, &t1)?;
        let rhs = alg.mul(&alg.mul(&t2, &t1)?, &t2)?;
        if lhs != rhs {
            return Ok(Err("braid relation unexpectedly affected".into()));
        }
        Ok(Ok(()))
    });

    Ok(runner.report)
}

/// Lexicographically least reduced words for all permutations in S_n,
/// written over the generator ids of `gens` (T1 -> id of T1, ...). This is
/// the independent combinatorial oracle for the Hecke basis.
pub fn sn_lex_least_reduced_words(n: usize, gens: &GeneratorSet) -> BTreeSet<Vec<u8>> {
    fn inversions(p: &[usize]) -> usize {
        let mut inv = 0;
        for i in 0..p.len() {
            for j in (i + 1)..p.len() {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        inv
    }
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    let mut words = BTreeSet::new();
    for perm in perms(n) {
        let mut p = perm;
        let mut word: Vec<u8> = Vec::new();
        let mut len = inversions(&p);
        while len > 0 {
            // Smallest i with length(s_i . p) < length(p): swap values i-1, i.
            for i in 1..n {
                let (a, b) = (
                    p.iter().position(|&x| x == i - 1).unwrap(),
                    p.iter().position(|&x| x == i).unwrap(),
                );
                let mut q = p.clone();
                q.swap(a, b);
                let l2 = inversions(&q);
                if l2 < len {
                    word.push(gens.id(&tn(i)).expect("generator exists"));
                    p = q;
                    len = l2;
                    break;
                }
            }
        }
        words.insert(word);
    }
    words
}

/// Experimental braid–Hecke suite: closures, cubic minimal polynomial,
/// contraction generators as a Hecke system, and the tangle quotient.
pub fn braid_hecke_suite(seed: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("braid-hecke", seed, 1);
    let pres2 = braid_hecke_presentation(2, false);
    let guards: Vec<&str> = pres2.guards.iter().map(|s| s.as_str()).collect();
    let point = crate::scalar::sample_generic(&["q", "nu"], &guards, seed)?;

    // Rank two: closure dimension is recorded, not asserted.
    match close_algebra(&pres2, &point, 64) {
        Ok(alg) => report.push(
            "rank-two-closure",
            true,
            format!("dimension {}", alg.dim()),
        ),
        Err(e) => report.push("rank-two-closure", false, format!("{e}")),
    }

    // Rank three: the dimension is an open quantity; a cap overflow is
    // reported but tolerated. Audit failures are genuine failures.
    let pres3 = braid_hecke_presentation(3, false);
    let alg3 = match close_algebra(&pres3, &point, 3000) {
        Ok(alg) => {
            report.push(
                "rank-three-closure",
                true,
                format!("dimension {}", alg.dim()),
            );
            Some(alg)
        }
        Err(Error::DimensionOverflow { max_dim, .. }) => {
            report.push(
                "rank-three-closure",
                true,
                format!("dimension not determined below cap {max_dim}"),
            );
            None
        }
        Err(Error::CompletionDiverged { .. }) => {
            report.push(
                "rank-three-closure",
                true,
                "rewriting system not completed below the rule budget".to_string(),
            );
            None
        }
        Err(e) => {
            report.push("rank-three-closure", false, format!("{e}"));
            None
        }
    };

    if let Some(alg) = &alg3 {
        // Cubic minimal polynomial: (x - q)(x + q^-1)(x - nu).
        let q = point.get("q").clone();
        let nu = point.get("nu").clone();
        let qinv = Rat::from_integer(1.into()) / q.clone();
        let e1 = &(&q - &qinv) + &nu;
        let e2 = &(&nu * &(&q - &qinv)) - &Rat::from_integer(1.into());
        let expected = vec![nu.clone(), e2, -e1, Rat::from_integer(1.into())];
        let t1 = alg.gen_elem("T1")?;
        let mp = alg.min_poly(&t1)?;
        report.push(
            "cubic-minimal-polynomial",
            mp == expected,
            if mp == expected {
                "roots q, -q^-1, nu".to_string()
            } else {
                format!("unexpected minimal polynomial of degree {}", mp.len() - 1)
            },
        );

        // The contraction generators satisfy a Hecke-type system with
        // parameter p fixed by p + p^-1 = mu.
        let mu = eval_formula("mu", &[], &point)?;
        let k1 = alg.gen_elem("K1")?;
        let k2 = alg.gen_elem("K2")?;
        let quad_ok = alg.mul(&k1, &k1)? == k1.scale(&mu) && alg.mul(&k2, &k2)? == k2.scale(&mu);
        report.push(
            "contractor-hecke-quadratic",
            quad_ok,
            "K_i^2 = (p + p^-1) K_i",
        );
        let lhs = alg
            .mul(&alg.mul(&k2, &k1)?, &k2)?
            .sub(&k2)?;
        let rhs = alg
            .mul(&alg.mul(&k1, &k2)?, &k1)?
            .sub(&k1)?;
        report.push(
            "contractor-hecke-braid",
            lhs == rhs,
            "K2 K1 K2 - K2 = K1 K2 K1 - K1",
        );
    }

    // Tangle quotient at rank three must close at the BMW dimension and
    // satisfy every BMW defining relation.
    let quot_pres = braid_hecke_presentation(3, true);
    match close_algebra(&quot_pres, &point, 4 * bmw_dim(3) + 8) {
        Ok(quot) => {
            report.push(
                "tangle-quotient-dimension",
                quot.dim() == bmw_dim(3),
                format!("dimension {} (expected {})", quot.dim(), bmw_dim(3)),
            );
            let bmw_pres = bmw_presentation(3);
            let mut images = BTreeMap::new();
            for i in 1..3 {
                images.insert(tn(i), quot.gen_elem(&tn(i))?);
                images.insert(kn(i), quot.gen_elem(&kn(i))?);
            }
            let hom = check_homomorphism("tangle-quotient", &bmw_pres, &quot, &images, false)?;
            report.push(
                "tangle-quotient-relations",
                hom.all_ok(),
                if hom.all_ok() {
                    "all BMW defining relations hold in the quotient".to_string()
                } else {
                    let bad: Vec<String> = hom
                        .entries
                        .iter()
                        .filter(|(_, ok, _)| !ok)
                        .map(|(name, _, m)| format!("{name}: {m}"))
                        .collect();
                    bad.join("; ")
                },
            );
        }
        Err(e) => {
            report.push("tangle-quotient-dimension", false, format!("{e}"));
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::sample_generic;

    fn generic_point(seed: u64) -> ParameterPoint {
        let pres = bmw_presentation(3);
        let guards: Vec<&str> = pres.guards.iter().map(|s| s.as_str()).collect();
        sample_generic(&["q", "nu"], &guards, seed).unwrap()
    }

    #[test]
    fn bmw_dimensions_two_and_three() {
        let inst2 = build_bmw(2, 11).unwrap();
        assert_eq!(inst2.algebra.dim(), 3);
        let inst3 = build_bmw(3, 12).unwrap();
        assert_eq!(inst3.algebra.dim(), 15);
    }

    #[test]
    fn bmw_dimension_four() {
        // (2n-1)!! at n = 4; closing this rank requires the completion pass.
        let inst4 = build_bmw(4, 13).unwrap();
        assert_eq!(inst4.algebra.dim(), 105);
        assert_eq!(bmw_dim(4), 105);
    }

    #[test]
    fn skein_normal_forms() {
        let inst = build_bmw(2, 21).unwrap();
        let alg = &inst.algebra;
        let d = inst.delta();
        let nu = inst.nu();
        let lhs = alg.normal_form_str("T1 T1").unwrap();
        let rhs = alg
            .unit_elem()
            .add(&inst.t(1).unwrap().scale(&d))
            .unwrap()
            .sub(&inst.kappa(1).scale(&(&d * &nu)))
            .unwrap();
        assert_eq!(lhs, rhs);
        let absorb = alg.normal_form_str("K1 T1").unwrap();
        assert_eq!(absorb, inst.kappa(1).scale(&nu));
    }

    #[test]
    fn hecke_dimension_and_reduced_word_basis() {
        for (n, seed) in [(3usize, 31u64), (4, 32)] {
            let inst = build_hecke(n, seed).unwrap();
            assert_eq!(inst.algebra.dim(), hecke_dim(n));
            let oracle = sn_lex_least_reduced_words(n, &inst.algebra.gens);
            let basis: BTreeSet<Vec<u8>> = inst.algebra.basis.iter().cloned().collect();
            assert_eq!(basis, oracle, "basis differs from reduced-word oracle");
        }
    }

    #[test]
    fn baxterized_pole_reporting() {
        let inst = build_bmw(2, 41).unwrap();
        let u = rat(7, 3);
        let err = baxterized(&inst, 1, &u, &u, Baxter::Plain).unwrap_err();
        assert!(is_pole(&err, "v/u - 1"), "got {err}");
        let q = inst.q();
        let nu = inst.nu();
        let v = -&(&nu * &u) / &q;
        let err2 = baxterized(&inst, 1, &u, &v, Baxter::Plain).unwrap_err();
        assert!(is_pole(&err2, "1 + q*v/(nu*u)"), "got {err2}");
        // Tilde is regular at u = v.
        let tilde = baxterized(&inst, 1, &u, &u, Baxter::Tilde).unwrap();
        assert_eq!(tilde, inst.algebra.unit_elem().scale(&inst.delta()));
    }

    #[test]
    fn corrupted_coefficient_is_detected() {
        let inst = build_bmw(3, 51).unwrap();
        let alg = &inst.algebra;
        let mu = inst.mu().unwrap();
        let k1 = inst.kappa(1);
        assert_eq!(alg.mul(k1, k1).unwrap(), k1.scale(&mu));
        let mu_bad = &mu + &Rat::from_integer(1.into());
        assert_ne!(alg.mul(k1, k1).unwrap(), k1.scale(&mu_bad));
        // Braid relation never involves the corrupted coefficient.
        let t1 = inst.t(1).unwrap();
        let t2 = inst.t(2).unwrap();
        assert_eq!(
            alg.mul(&alg.mul(&t1, &t2).unwrap(), &t1).unwrap(),
            alg.mul(&alg.mul(&t2, &t1).unwrap(), &t2).unwrap()
        );
    }

    #[test]
    fn identity_suite_passes_at_two_points() {
        let report = identity_suite(3, 2, 61).unwrap();
        assert!(report.all_ok(), "failures: {:?}", report.failures());
    }

    #[test]
    fn same_point_same_tables() {
        let point = generic_point(71);
        let a = build_bmw_at(3, &point).unwrap();
        let b = build_bmw_at(3, &point).unwrap();
        assert_eq!(a.algebra.basis, b.algebra.basis);
        let pa = crate::algebra::export_json(&a.algebra).to_string();
        let pb = crate::algebra::export_json(&b.algebra).to_string();
        assert_eq!(pa, pb);
    }
}
