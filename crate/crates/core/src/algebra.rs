//! Linear closure of a finitely presented algebra at a parameter point:
//! breadth-first discovery of a monomial basis, generator multiplication
//! tables, normal forms, element arithmetic, and a homomorphism checker.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::presentation::{Presentation, Relation};
use crate::rewrite::{complete_ruleset, instantiate_checked, LinComb, Rewriter};
use crate::scalar::{ParameterPoint, Rat};
use crate::word::{graded_cmp, GeneratorSet, Word};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};

static ALGEBRA_COUNTER: AtomicUsize = AtomicUsize::new(1);

pub type SparseRow<F> = Vec<(u32, F)>;

/// A finite-dimensional quotient algebra with discovered monomial basis and
/// complete generator multiplication tables. Immutable once built.
#[derive(Debug, Clone)]
pub struct ClosedAlgebra<F: Field> {
    pub id: usize,
    pub pres_name: String,
    pub gens: GeneratorSet,
    pub point: ParameterPoint,
    /// Evaluation environment the tables were instantiated with (the point's
    /// assignment, possibly extended by a symbolic spectral variable).
    pub env: BTreeMap<String, F>,
    /// Basis words sorted in graded length-lex order; basis[unit] is empty.
    pub basis: Vec<Word>,
    pub index: HashMap<Word, u32>,
    pub left: Vec<Vec<SparseRow<F>>>,
    pub right: Vec<Vec<SparseRow<F>>>,
    pub inv_expansion: HashMap<u8, Vec<(F, Word)>>,
    pub unit: u32,
}

/// Sparse element of one ClosedAlgebra.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<F: Field> {
    pub owner: usize,
    pub coeffs: BTreeMap<u32, F>,
}

impl<F: Field> AlgebraElement<F> {
    pub fn zero(owner: usize) -> Self {
        AlgebraElement {
            owner,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn same_owner(&self, other: &Self) -> Result<()> {
        if self.owner != other.owner {
            return Err(Error::OwnerMismatch {
                left: self.owner,
                right: other.owner,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_owner(other)?;
        let mut out = self.clone();
        for (i, c) in &other.coeffs {
            let entry = out.coeffs.entry(*i).or_insert_with(F::zero);
            *entry = entry.add(c);
            if entry.is_zero() {
                out.coeffs.remove(i);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        AlgebraElement {
            owner: self.owner,
            coeffs: self
                .coeffs
                .iter()
                .map(|(i, c)| (*i, c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return AlgebraElement::zero(self.owner);
        }
        AlgebraElement {
            owner: self.owner,
            coeffs: self.coeffs.iter().map(|(i, x)| (*i, x.mul(c))).collect(),
        }
    }

    pub fn coeff(&self, i: u32) -> F {
        self.coeffs.get(&i).cloned().unwrap_or_else(F::zero)
    }
}

/// Close a presentation over exact rationals at a guarded parameter point.
pub fn close_algebra(
    pres: &Presentation,
    point: &ParameterPoint,
    max_dim: usize,
) -> Result<ClosedAlgebra<Rat>> {
    let env: BTreeMap<String, Rat> = point.assignment.clone();
    close_algebra_env(pres, env, point.clone(), max_dim)
}

/// Generic closure: `env` supplies the coefficient field (e.g. rational
/// functions in one symbolic spectral variable).
pub fn close_algebra_env<F: Field>(
    pres: &Presentation,
    env: BTreeMap<String, F>,
    point: ParameterPoint,
    max_dim: usize,
) -> Result<ClosedAlgebra<F>> {
    let timing = std::env::var_os("JUCYS_TIMING").is_some();
    let t0 = std::time::Instant::now();
    let rs = instantiate_checked(pres, &env)?;
    let rs = complete_ruleset(rs, &pres.name)?;
    if timing {
        eprintln!("[timing] {}: completion {:?}", pres.name, t0.elapsed());
    }
    let t0 = std::time::Instant::now();
    let mut rw = Rewriter::new(rs);
    let base_ids = pres.gens.base_ids();

    // Phase 1: discover all irreducible words reachable from the unit by
    // one-sided generator multiplication on either side.
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    let mut queue: VecDeque<Word> = VecDeque::new();
    seen.insert(Vec::new());
    queue.push_back(Vec::new());
    while let Some(w) = queue.pop_front() {
        for &g in &base_ids {
            for side in 0..2 {
                let mut prod = Vec::with_capacity(w.len() + 1);
                if side == 0 {
                    prod.extend_from_slice(&w);
                    prod.push(g);
                } else {
                    prod.push(g);
                    prod.extend_from_slice(&w);
                }
                let lin = rw.canon(&prod);
                for t in lin.keys() {
                    if !seen.contains(t) {
                        if seen.len() >= max_dim {
                            return Err(Error::DimensionOverflow {
                                presentation: pres.name.clone(),
                                max_dim,
                            });
                        }
                        seen.insert(t.clone());
                        queue.push_back(t.clone());
                    }
                }
            }
        }
    }

    if timing {
        eprintln!(
            "[timing] {}: basis discovery {:?} ({} words, memo {})",
            pres.name,
            t0.elapsed(),
            seen.len(),
            rw.memo_len()
        );
    }
    let t0 = std::time::Instant::now();

    // Phase 2: sorted basis and index.
    let mut basis: Vec<Word> = seen.into_iter().collect();
    basis.sort_by(|a, b| graded_cmp(a, b));
    let index: HashMap<Word, u32> = basis
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i as u32))
        .collect();
    let unit = index[&Vec::new()];
    let dim = basis.len();

    let to_row = |lin: &LinComb<F>, index: &HashMap<Word, u32>| -> Result<SparseRow<F>> {
        let mut row: SparseRow<F> = Vec::with_capacity(lin.len());
        for (w, c) in lin {
            let i = index.get(w).ok_or_else(|| Error::Other(format!(
                "closure instability: irreducible word `{}` escaped the basis",
                pres.gens.word_string(w)
            )))?;
            row.push((*i, c.clone()));
        }
        row.sort_by_key(|(i, _)| *i);
        Ok(row)
    };

    // Phase 3: assemble tables for base generators (memoized rewrites).
    let gcount = pres.gens.len();
    let mut left: Vec<Vec<SparseRow<F>>> = vec![Vec::new(); gcount];
    let mut right: Vec<Vec<SparseRow<F>>> = vec![Vec::new(); gcount];
    for &g in &base_ids {
        let mut lrows = Vec::with_capacity(dim);
        let mut rrows = Vec::with_capacity(dim);
        for w in &basis {
            let mut gw = Vec::with_capacity(w.len() + 1);
            gw.push(g);
            gw.extend_from_slice(w);
            lrows.push(to_row(&rw.canon(&gw), &index)?);
            let mut wg = w.clone();
            wg.push(g);
            rrows.push(to_row(&rw.canon(&wg), &index)?);
        }
        left[g as usize] = lrows;
        right[g as usize] = rrows;
    }

    if timing {
        eprintln!(
            "[timing] {}: base tables {:?} (memo {})",
            pres.name,
            t0.elapsed(),
            rw.memo_len()
        );
    }
    let t0 = std::time::Instant::now();

    let mut alg = ClosedAlgebra {
        id: ALGEBRA_COUNTER.fetch_add(1, Ordering::Relaxed),
        pres_name: pres.name.clone(),
        gens: pres.gens.clone(),
        point,
        env,
        basis,
        index,
        left,
        right,
        inv_expansion: rw.rs.inv_expansion.clone(),
        unit,
    };

    // Phase 4: tables for inverse symbols, via their expansions.
    for (inv_id, exp) in alg.inv_expansion.clone() {
        let mut lrows = Vec::with_capacity(dim);
        let mut rrows = Vec::with_capacity(dim);
        for i in 0..dim as u32 {
            let b = alg.basis_elem(i);
            let mut racc = AlgebraElement::zero(alg.id);
            let mut lacc = AlgebraElement::zero(alg.id);
            for (c, w) in &exp {
                racc = racc.add(&alg.fold_right(&b, w).scale(c))?;
                lacc = lacc.add(&alg.fold_left(w, &b).scale(c))?;
            }
            rrows.push(racc.coeffs.into_iter().collect());
            lrows.push(lacc.coeffs.into_iter().collect());
        }
        alg.left[inv_id as usize] = lrows;
        alg.right[inv_id as usize] = rrows;
    }

    if timing {
        eprintln!("[timing] {}: inverse tables {:?}", pres.name, t0.elapsed());
    }
    let t0 = std::time::Instant::now();

    // Phase 5: audits. Normal form must fix every basis word, and table
    // multiplication must be associative on sampled triples.
    for (i, w) in alg.basis.clone().iter().enumerate() {
        let nf = alg.normal_form(w)?;
        let expected = alg.basis_elem(i as u32);
        if nf != expected {
            return Err(Error::NonAssociative {
                presentation: alg.pres_name.clone(),
                a: alg.gens.word_string(w),
                b: "normal form audit".into(),
                c: format!("{} terms", nf.coeffs.len()),
            });
        }
    }
    alg.associativity_audit(1000)?;
    if timing {
        eprintln!("[timing] {}: audits {:?}", pres.name, t0.elapsed());
    }
    Ok(alg)
}

impl<F: Field> ClosedAlgebra<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn unit_elem(&self) -> AlgebraElement<F> {
        self.basis_elem(self.unit)
    }

    pub fn basis_elem(&self, i: u32) -> AlgebraElement<F> {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(i, F::one());
        AlgebraElement {
            owner: self.id,
            coeffs,
        }
    }

    pub fn scalar_elem(&self, c: F) -> AlgebraElement<F> {
        self.unit_elem().scale(&c)
    }

    fn check_owner(&self, a: &AlgebraElement<F>) -> Result<()> {
        if a.owner != self.id {
            return Err(Error::OwnerMismatch {
                left: self.id,
                right: a.owner,
            });
        }
        Ok(())
    }

    pub fn right_mul_gen(&self, x: &AlgebraElement<F>, g: u8) -> AlgebraElement<F> {
        let table = &self.right[g as usize];
        let mut out: BTreeMap<u32, F> = BTreeMap::new();
        for (i, c) in &x.coeffs {
            for (j, d) in &table[*i as usize] {
                let entry = out.entry(*j).or_insert_with(F::zero);
                *entry = entry.add(&c.mul(d));
            }
        }
        out.retain(|_, c| !c.is_zero());
        AlgebraElement {
            owner: x.owner,
            coeffs: out,
        }
    }

    pub fn left_mul_gen(&self, g: u8, x: &AlgebraElement<F>) -> AlgebraElement<F> {
        let table = &self.left[g as usize];
        let mut out: BTreeMap<u32, F> = BTreeMap::new();
        for (i, c) in &x.coeffs {
            for (j, d) in &table[*i as usize] {
                let entry = out.entry(*j).or_insert_with(F::zero);
                *entry = entry.add(&c.mul(d));
            }
        }
        out.retain(|_, c| !c.is_zero());
        AlgebraElement {
            owner: x.owner,
            coeffs: out,
        }
    }

    /// x * (word), folding right-table applications left to right.
    pub fn fold_right(&self, x: &AlgebraElement<F>, w: &Word) -> AlgebraElement<F> {
        let mut acc = x.clone();
        for &g in w {
            if let Some(exp) = self.inv_expansion.get(&g) {
                let mut next = AlgebraElement::zero(acc.owner);
                for (c, ew) in exp {
                    let term = self.fold_right(&acc, ew).scale(c);
                    next = next.add(&term).expect("owner fixed");
                }
                acc = next;
            } else {
                acc = self.right_mul_gen(&acc, g);
            }
        }
        acc
    }

    /// (word) * x, folding left-table applications right to left.
    pub fn fold_left(&self, w: &Word, x: &AlgebraElement<F>) -> AlgebraElement<F> {
        let mut acc = x.clone();
        for &g in w.iter().rev() {
            if let Some(exp) = self.inv_expansion.get(&g) {
                let mut next = AlgebraElement::zero(acc.owner);
                for (c, ew) in exp {
                    let term = self.fold_left(ew, &acc).scale(c);
                    next = next.add(&term).expect("owner fixed");
                }
                acc = next;
            } else {
                acc = self.left_mul_gen(g, &acc);
            }
        }
        acc
    }

    /// Unique expansion of a word (inverse symbols allowed) over the basis.
    pub fn normal_form(&self, w: &Word) -> Result<AlgebraElement<F>> {
        for &g in w {
            if g as usize >= self.gens.len() {
                return Err(Error::UnknownGenerator {
                    name: format!("#{g}"),
                    presentation: self.pres_name.clone(),
                });
            }
            if self.gens.is_inverse_symbol[g as usize] && !self.inv_expansion.contains_key(&g) {
                return Err(Error::UnknownGenerator {
                    name: self.gens.name(g).to_string(),
                    presentation: format!("{} (no inverse expansion)", self.pres_name),
                });
            }
        }
        Ok(self.fold_right(&self.unit_elem(), w))
    }

    pub fn normal_form_str(&self, s: &str) -> Result<AlgebraElement<F>> {
        let w = self.gens.parse_word(s).map_err(|e| match e {
            Error::UnknownGenerator { name, .. } => Error::UnknownGenerator {
                name,
                presentation: self.pres_name.clone(),
            },
            other => other,
        })?;
        self.normal_form(&w)
    }

    pub fn gen_elem(&self, name: &str) -> Result<AlgebraElement<F>> {
        self.normal_form_str(name)
    }

    pub fn mul(&self, a: &AlgebraElement<F>, b: &AlgebraElement<F>) -> Result<AlgebraElement<F>> {
        self.check_owner(a)?;
        self.check_owner(b)?;
        let mut out = AlgebraElement::zero(self.id);
        for (j, cb) in &b.coeffs {
            let term = self.fold_right(a, &self.basis[*j as usize]).scale(cb);
            out = out.add(&term)?;
        }
        Ok(out)
    }

    pub fn commutator(
        &self,
        a: &AlgebraElement<F>,
        b: &AlgebraElement<F>,
    ) -> Result<AlgebraElement<F>> {
        let ab = self.mul(a, b)?;
        let ba = self.mul(b, a)?;
        ab.sub(&ba)
    }

    pub fn pow(&self, a: &AlgebraElement<F>, k: u64) -> Result<AlgebraElement<F>> {
        let mut acc = self.unit_elem();
        for _ in 0..k {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }

    fn associativity_audit(&self, triples: usize) -> Result<()> {
        let dim = self.dim() as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(0xA11D17 ^ dim as u64);
        for _ in 0..triples {
            let i = rng.gen_range(0..dim);
            let j = rng.gen_range(0..dim);
            let k = rng.gen_range(0..dim);
            let a = self.basis_elem(i);
            let b = self.basis_elem(j);
            let c = self.basis_elem(k);
            let ab_c = self.mul(&self.mul(&a, &b)?, &c)?;
            let a_bc = self.mul(&a, &self.mul(&b, &c)?)?;
            if ab_c != a_bc {
                return Err(Error::NonAssociative {
                    presentation: self.pres_name.clone(),
                    a: self.gens.word_string(&self.basis[i as usize]),
                    b: self.gens.word_string(&self.basis[j as usize]),
                    c: self.gens.word_string(&self.basis[k as usize]),
                });
            }
        }
        Ok(())
    }

    /// Dense left-multiplication matrix of `a` (column j = a * basis[j]).
    pub fn left_mult_matrix(&self, a: &AlgebraElement<F>) -> Result<Vec<Vec<F>>> {
        self.check_owner(a)?;
        let dim = self.dim();
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim as u32 {
            let col = self.fold_right(a, &self.basis[j as usize]);
            let mut dense = vec![F::zero(); dim];
            for (i, c) in col.coeffs {
                dense[i as usize] = c;
            }
            cols.push(dense);
        }
        // transpose: rows indexed by basis, columns by j
        let mut rows = vec![vec![F::zero(); dim]; dim];
        for (j, col) in cols.into_iter().enumerate() {
            for (i, c) in col.into_iter().enumerate() {
                rows[i][j] = c;
            }
        }
        Ok(rows)
    }

    /// Monic minimal polynomial coefficients c_0..c_k (c_k = 1) of `a` acting
    /// by left multiplication on the unit's cyclic subspace.
    pub fn min_poly(&self, a: &AlgebraElement<F>) -> Result<Vec<F>> {
        self.check_owner(a)?;
        // Echelon rows: (pivot index, sparse row, expression over powers).
        let mut rows: Vec<(u32, BTreeMap<u32, F>, Vec<F>)> = Vec::new();
        let mut power = self.unit_elem();
        let mut k = 0usize;
        loop {
            let mut vec = power.coeffs.clone();
            let mut expr = vec![F::zero(); k + 1];
            expr[k] = F::one();
            for (piv, row, rexpr) in &rows {
                if let Some(c) = vec.get(piv).cloned() {
                    if c.is_zero() {
                        continue;
                    }
                    for (i, x) in row {
                        let entry = vec.entry(*i).or_insert_with(F::zero);
                        *entry = entry.sub(&c.mul(x));
                        if entry.is_zero() {
                            vec.remove(i);
                        }
                    }
                    for (i, x) in rexpr.iter().enumerate() {
                        if i < expr.len() {
                            expr[i] = expr[i].sub(&c.mul(x));
                        } else {
                            expr.push(c.mul(x).neg());
                        }
                    }
                }
            }
            vec.retain(|_, c| !c.is_zero());
            if vec.is_empty() {
                // a^k = combination of lower powers: expr gives minimal polynomial.
                // expr holds a^k - sum(...) = 0 with expr[k] possibly scaled; normalize monic.
                let lead = expr[k].clone();
                let inv = lead.inv().ok_or_else(|| Error::Other(
                    "degenerate echelon in minimal polynomial".into(),
                ))?;
                return Ok(expr.into_iter().map(|c| c.mul(&inv)).collect());
            }
            // insert into echelon: pivot = smallest index
            let piv = *vec.keys().next().unwrap();
            let pivc = vec[&piv].clone();
            let pinv = pivc.inv().expect("pivot nonzero");
            let row: BTreeMap<u32, F> = vec.iter().map(|(i, c)| (*i, c.mul(&pinv))).collect();
            let rexpr: Vec<F> = expr.iter().map(|c| c.mul(&pinv)).collect();
            rows.push((piv, row, rexpr));
            rows.sort_by_key(|(p, _, _)| *p);
            if k > self.dim() {
                return Err(Error::Other("minimal polynomial did not terminate".into()));
            }
            power = self.mul(&power, a)?;
            k += 1;
        }
    }

    /// Two-sided inverse when it exists: from the minimal polynomial of a on
    /// its cyclic subspace; verified by an exact product check.
    pub fn inverse(&self, a: &AlgebraElement<F>) -> Result<Option<AlgebraElement<F>>> {
        let mp = self.min_poly(a)?;
        let c0 = mp[0].clone();
        let Some(c0inv) = c0.inv() else {
            return Ok(None);
        };
        // a * (-(c1 + c2 a + ... + ck a^{k-1})/c0) = 1
        let mut acc = AlgebraElement::zero(self.id);
        let mut power = self.unit_elem();
        for c in mp.iter().skip(1) {
            acc = acc.add(&power.scale(c))?;
            power = self.mul(&power, a)?;
        }
        let candidate = acc.scale(&c0inv.neg());
        let check = self.mul(a, &candidate)?;
        let check2 = self.mul(&candidate, a)?;
        if check == self.unit_elem() && check2 == self.unit_elem() {
            Ok(Some(candidate))
        } else {
            Ok(None)
        }
    }

    pub fn elem_string(&self, a: &AlgebraElement<F>) -> String {
        if a.coeffs.is_empty() {
            return "0".into();
        }
        a.coeffs
            .iter()
            .map(|(i, c)| format!("({c:?})·{}", self.gens.word_string(&self.basis[*i as usize])))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Result of checking one map against every defining relation of a source
/// presentation.
#[derive(Debug, Clone)]
pub struct HomReport {
    pub name: String,
    pub entries: Vec<(String, bool, String)>,
}

impl HomReport {
    pub fn all_ok(&self) -> bool {
        self.entries.iter().all(|(_, ok, _)| *ok)
    }
}

/// Check that `images` defines a homomorphism (or anti-homomorphism) from the
/// source presentation into the target algebra: every defining relation maps
/// to an exact zero difference. Invertible source generators must receive
/// invertible images (precondition entries report failures).
pub fn check_homomorphism<F: Field>(
    name: &str,
    source: &Presentation,
    target: &ClosedAlgebra<F>,
    images: &BTreeMap<String, AlgebraElement<F>>,
    anti: bool,
) -> Result<HomReport> {
    let mut report = HomReport {
        name: name.to_string(),
        entries: Vec::new(),
    };
    // Resolve images per generator id; compute inverses where required.
    let mut by_id: HashMap<u8, AlgebraElement<F>> = HashMap::new();
    for &g in &source.gens.base_ids() {
        let gname = source.gens.name(g).to_string();
        let img = images.get(&gname).ok_or_else(|| Error::UnknownGenerator {
            name: gname.clone(),
            presentation: format!("images for {}", source.name),
        })?;
        target.check_owner(img)?;
        by_id.insert(g, img.clone());
        if let Some(inv_id) = source.gens.inverse_id(g) {
            match target.inverse(img)? {
                Some(inv) => {
                    by_id.insert(inv_id, inv);
                }
                None => {
                    report.entries.push((
                        format!("invertibility of image of {gname}"),
                        false,
                        "image is not invertible".into(),
                    ));
                }
            }
        }
    }

    let image_of_word = |w: &Word, by_id: &HashMap<u8, AlgebraElement<F>>| -> Option<AlgebraElement<F>> {
        let mut acc = target.unit_elem();
        let syms: Vec<u8> = if anti {
            w.iter().rev().copied().collect()
        } else {
            w.clone()
        };
        for g in syms {
            let img = by_id.get(&g)?;
            acc = target.mul(&acc, img).ok()?;
        }
        Some(acc)
    };

    let eval_side = |side: &[(crate::expr::Expr, Word)],
                     by_id: &HashMap<u8, AlgebraElement<F>>|
     -> Result<Option<AlgebraElement<F>>> {
        let mut acc = AlgebraElement::zero(target.id);
        for (coeff, w) in side {
            let c = coeff.eval(&target.env)?;
            match image_of_word(w, by_id) {
                Some(img) => acc = acc.add(&img.scale(&c))?,
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    };

    for Relation { name: rname, lhs, rhs } in &source.relations {
        let l = eval_side(lhs, &by_id)?;
        let r = eval_side(rhs, &by_id)?;
        match (l, r) {
            (Some(l), Some(r)) => {
                let diff = l.sub(&r)?;
                let ok = diff.is_zero();
                report.entries.push((
                    rname.clone(),
                    ok,
                    if ok {
                        "exact zero".into()
                    } else {
                        format!("{} nonzero terms", diff.coeffs.len())
                    },
                ));
            }
            _ => {
                report.entries.push((
                    rname.clone(),
                    false,
                    "skipped: relation involves a non-invertible image".into(),
                ));
            }
        }
    }
    Ok(report)
}

/// Dense rank over a field, for small matrices (independent audit tool).
pub fn rank<F: Field>(mat: &[Vec<F>]) -> usize {
    let mut m: Vec<Vec<F>> = mat.to_vec();
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let Some(piv) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, piv);
        let inv = m[row][col].inv().unwrap();
        for c in col..cols {
            m[row][c] = m[row][c].mul(&inv);
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..cols {
                    let sub = m[row][c].mul(&factor);
                    m[r][c] = m[r][c].sub(&sub);
                }
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// JSON structure-constant export (rational coefficients only).
pub fn export_json(alg: &ClosedAlgebra<Rat>) -> serde_json::Value {
    let tables = |t: &Vec<Vec<SparseRow<Rat>>>| -> Vec<serde_json::Value> {
        let mut out = Vec::new();
        for (g, rows) in t.iter().enumerate() {
            if rows.is_empty() {
                continue;
            }
            for (row, entries) in rows.iter().enumerate() {
                for (col, c) in entries {
                    out.push(serde_json::json!([
                        alg.gens.name(g as u8),
                        row,
                        col,
                        c.to_string()
                    ]));
                }
            }
        }
        out
    };
    let gens: Vec<serde_json::Value> = alg
        .gens
        .names
        .iter()
        .enumerate()
        .filter(|(i, _)| !alg.gens.is_inverse_symbol[*i])
        .map(|(i, n)| serde_json::json!([n, alg.gens.inverse[i].is_some()]))
        .collect();
    let expansions: BTreeMap<String, Vec<serde_json::Value>> = alg
        .inv_expansion
        .iter()
        .map(|(id, terms)| {
            (
                alg.gens.name(*id).to_string(),
                terms
                    .iter()
                    .map(|(c, w)| serde_json::json!([c.to_string(), alg.gens.word_string(w)]))
                    .collect(),
            )
        })
        .collect();
    serde_json::json!({
        "presentation": alg.pres_name,
        "seed": alg.point.seed,
        "point": alg.point.assignment.iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect::<BTreeMap<String, String>>(),
        "generators": gens,
        "basis": alg.basis.iter().map(|w| alg.gens.word_string(w)).collect::<Vec<_>>(),
        "unit": alg.unit,
        "inverse_expansions": expansions,
        "left": tables(&alg.left),
        "right": tables(&alg.right),
    })
}

/// Rebuild a ClosedAlgebra from its JSON export (fresh owner id).
pub fn import_json(doc: &serde_json::Value) -> Result<ClosedAlgebra<Rat>> {
    let obj = doc.as_object().ok_or_else(|| Error::Parse("expected object".into()))?;
    let get = |k: &str| obj.get(k).ok_or_else(|| Error::Parse(format!("missing key `{k}`")));
    let pres_name = get("presentation")?
        .as_str()
        .ok_or_else(|| Error::Parse("presentation must be a string".into()))?
        .to_string();
    let gen_spec: Vec<(String, bool)> = get("generators")?
        .as_array()
        .ok_or_else(|| Error::Parse("generators must be an array".into()))?
        .iter()
        .map(|v| {
            let pair = v.as_array().unwrap();
            (
                pair[0].as_str().unwrap().to_string(),
                pair[1].as_bool().unwrap(),
            )
        })
        .collect();
    let gens = GeneratorSet::build(
        &gen_spec
            .iter()
            .map(|(n, inv)| (n.as_str(), *inv))
            .collect::<Vec<_>>(),
    );
    let parse_rat = |s: &str| -> Result<Rat> {
        s.parse::<Rat>()
            .map_err(|e| Error::Parse(format!("bad rational `{s}`: {e}")))
    };
    let mut assignment = BTreeMap::new();
    for (k, v) in get("point")?.as_object().unwrap() {
        assignment.insert(k.clone(), parse_rat(v.as_str().unwrap())?);
    }
    let point = ParameterPoint {
        assignment: assignment.clone(),
        seed: get("seed")?.as_u64().unwrap_or(0),
        guard_log: Vec::new(),
        rejected_rounds: 0,
    };
    let basis: Vec<Word> = get("basis")?
        .as_array()
        .unwrap()
        .iter()
        .map(|v| gens.parse_word(v.as_str().unwrap()))
        .collect::<Result<_>>()?;
    let index: HashMap<Word, u32> = basis
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i as u32))
        .collect();
    let dim = basis.len();
    let mut left: Vec<Vec<SparseRow<Rat>>> = vec![vec![Vec::new(); dim]; gens.len()];
    let mut right: Vec<Vec<SparseRow<Rat>>> = vec![vec![Vec::new(); dim]; gens.len()];
    for (key, target) in [("left", &mut left), ("right", &mut right)] {
        for entry in get(key)?.as_array().unwrap() {
            let e = entry.as_array().unwrap();
            let g = gens
                .id(e[0].as_str().unwrap())
                .ok_or_else(|| Error::Parse("unknown generator in tables".into()))?;
            let row = e[1].as_u64().unwrap() as usize;
            let col = e[2].as_u64().unwrap() as u32;
            let c = parse_rat(e[3].as_str().unwrap())?;
            target[g as usize][row].push((col, c));
        }
    }
    for t in left.iter_mut().chain(right.iter_mut()) {
        for row in t.iter_mut() {
            row.sort_by_key(|(i, _)| *i);
        }
    }
    let mut inv_expansion = HashMap::new();
    if let Some(exp) = obj.get("inverse_expansions").and_then(|v| v.as_object()) {
        for (name, terms) in exp {
            let id = gens
                .id(name)
                .ok_or_else(|| Error::Parse(format!("unknown inverse symbol `{name}`")))?;
            let parsed: Vec<(Rat, Word)> = terms
                .as_array()
                .unwrap()
                .iter()
                .map(|t| {
                    let pair = t.as_array().unwrap();
                    Ok((
                        parse_rat(pair[0].as_str().unwrap())?,
                        gens.parse_word(pair[1].as_str().unwrap())?,
                    ))
                })
                .collect::<Result<_>>()?;
            inv_expansion.insert(id, parsed);
        }
    }
    let unit = index
        .get(&Vec::new())
        .copied()
        .ok_or_else(|| Error::Parse("basis lacks the unit word".into()))?;
    Ok(ClosedAlgebra {
        id: ALGEBRA_COUNTER.fetch_add(1, Ordering::Relaxed),
        pres_name,
        gens,
        point,
        env: assignment,
        basis,
        index,
        left,
        right,
        inv_expansion,
        unit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_i, sample_generic};

    fn z2_algebra() -> ClosedAlgebra<Rat> {
        let gens = GeneratorSet::build(&[("t", false)]);
        let mut p = Presentation::new("order-two", gens);
        p.rule("tt", "t t", &[("1", "1")]).unwrap();
        let point = sample_generic(&[], &[], 1).unwrap();
        close_algebra(&p, &point, 10).unwrap()
    }

    #[test]
    fn closes_group_algebra_of_order_two() {
        let alg = z2_algebra();
        assert_eq!(alg.dim(), 2);
        let t = alg.gen_elem("t").unwrap();
        let t2 = alg.mul(&t, &t).unwrap();
        assert_eq!(t2, alg.unit_elem());
    }

    #[test]
    fn unit_multiplication_and_commutator() {
        let alg = z2_algebra();
        let t = alg.gen_elem("t").unwrap();
        assert_eq!(alg.mul(&alg.unit_elem(), &t).unwrap(), t);
        let c = alg.commutator(&t, &t).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn empty_word_is_unit() {
        let alg = z2_algebra();
        let nf = alg.normal_form(&vec![]).unwrap();
        assert_eq!(nf, alg.unit_elem());
    }

    #[test]
    fn owner_mismatch_detected() {
        let a1 = z2_algebra();
        let a2 = z2_algebra();
        let x = a1.gen_elem("t").unwrap();
        let y = a2.gen_elem("t").unwrap();
        assert!(matches!(
            x.add(&y),
            Err(Error::OwnerMismatch { .. })
        ));
        assert!(a1.mul(&x, &y).is_err());
    }

    #[test]
    fn dimension_overflow_reports() {
        // Free monoid on one generator never closes.
        let gens = GeneratorSet::build(&[("t", false)]);
        let p = Presentation::new("free", gens);
        let point = sample_generic(&[], &[], 1).unwrap();
        match close_algebra(&p, &point, 8) {
            Err(Error::DimensionOverflow { max_dim, .. }) => assert_eq!(max_dim, 8),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn min_poly_and_inverse() {
        let alg = z2_algebra();
        let t = alg.gen_elem("t").unwrap();
        // t^2 = 1: minimal polynomial x^2 - 1.
        let mp = alg.min_poly(&t).unwrap();
        assert_eq!(mp, vec![rat_i(-1), rat_i(0), rat_i(1)]);
        let tinv = alg.inverse(&t).unwrap().unwrap();
        assert_eq!(tinv, t);
        // 1 + t is not invertible ((1+t)(1-t) = 0).
        let sing = alg.unit_elem().add(&t).unwrap();
        assert!(alg.inverse(&sing).unwrap().is_none());
        let m = alg.left_mult_matrix(&sing).unwrap();
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn export_import_round_trip() {
        let alg = z2_algebra();
        let doc = export_json(&alg);
        let back = import_json(&doc).unwrap();
        assert_eq!(back.basis, alg.basis);
        assert_eq!(back.left, alg.left);
        assert_eq!(back.right, alg.right);
        assert_eq!(back.point.assignment, alg.point.assignment);
        let doc2 = export_json(&back);
        assert_eq!(doc, doc2);
    }
}
