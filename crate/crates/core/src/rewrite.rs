//! Numeric rewriting engine: oriented rules instantiated at a parameter
//! point, plus a bounded breadth-first search over length-preserving moves
//! that hunts for hidden redexes and canonicalizes move-orbits.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::presentation::Presentation;
use crate::word::{GeneratorSet, Word};
use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet, VecDeque};
use std::rc::Rc;

pub type LinComb<F> = BTreeMap<Word, F>;

pub fn lin_add_scaled<F: Field>(acc: &mut LinComb<F>, lin: &LinComb<F>, c: &F) {
    if c.is_zero() {
        return;
    }
    for (w, x) in lin {
        let entry = acc.entry(w.clone()).or_insert_with(F::zero);
        *entry = entry.add(&x.mul(c));
        if entry.is_zero() {
            acc.remove(w);
        }
    }
}

pub fn lin_single<F: Field>(w: Word) -> LinComb<F> {
    let mut m = BTreeMap::new();
    m.insert(w, F::one());
    m
}

#[derive(Debug, Clone)]
struct NumRule<F> {
    pattern: Word,
    rhs: Vec<(F, Word)>,
}

/// Rules and moves made numeric at one parameter point.
#[derive(Debug, Clone)]
pub struct RuleSet<F: Field> {
    pub gens: GeneratorSet,
    rules: Vec<NumRule<F>>,
    by_first: Vec<Vec<usize>>,
    /// Directed moves; both directions of each template are materialized.
    moves: Vec<(Word, Word)>,
    moves_by_first: Vec<Vec<usize>>,
    pub inv_expansion: HashMap<u8, Vec<(F, Word)>>,
    pub search_depth: usize,
    pub search_cap: usize,
}

pub const DEFAULT_SEARCH_DEPTH: usize = 64;
pub const DEFAULT_SEARCH_CAP: usize = 20_000;
const MEMO_CAP: usize = 600_000;

impl<F: Field> RuleSet<F> {
    /// A rule-free system over an alphabet; rules are added one by one.
    pub fn empty(gens: GeneratorSet) -> RuleSet<F> {
        let n = gens.len();
        RuleSet {
            gens,
            rules: Vec::new(),
            by_first: vec![Vec::new(); n],
            moves: Vec::new(),
            moves_by_first: vec![Vec::new(); n],
            inv_expansion: HashMap::new(),
            search_depth: DEFAULT_SEARCH_DEPTH,
            search_cap: DEFAULT_SEARCH_CAP,
        }
    }

    /// Evaluate every symbolic coefficient at `env`.
    pub fn instantiate(pres: &Presentation, env: &BTreeMap<String, F>) -> Result<RuleSet<F>> {
        let mut rs = RuleSet::empty(pres.gens.clone());
        for rule in &pres.rules {
            let rhs = rule
                .rhs
                .iter()
                .map(|(e, w)| Ok((e.eval(env)?, w.clone())))
                .collect::<Result<Vec<_>>>()?;
            rs.add_rule(rule.pattern.clone(), rhs);
        }
        for mv in &pres.moves {
            rs.add_move(mv.lhs.clone(), mv.rhs.clone());
        }
        for exp in &pres.inverse_expansions {
            let rhs = exp
                .rhs
                .iter()
                .map(|(e, w)| Ok((e.eval(env)?, w.clone())))
                .collect::<Result<Vec<_>>>()?;
            rs.inv_expansion.insert(exp.of, rhs);
        }
        Ok(rs)
    }

    /// Numeric rules as (pattern, right-hand side) pairs.
    pub fn rule_list(&self) -> Vec<(Word, Vec<(F, Word)>)> {
        self.rules
            .iter()
            .map(|r| (r.pattern.clone(), r.rhs.clone()))
            .collect()
    }

    /// Directed moves (both directions of every template).
    pub fn move_list(&self) -> Vec<(Word, Word)> {
        self.moves.clone()
    }

    pub fn add_rule(&mut self, pattern: Word, rhs: Vec<(F, Word)>) {
        let rhs: Vec<(F, Word)> = rhs.into_iter().filter(|(c, _)| !c.is_zero()).collect();
        let first = pattern[0] as usize;
        self.by_first[first].push(self.rules.len());
        self.rules.push(NumRule { pattern, rhs });
    }

    pub fn add_move(&mut self, lhs: Word, rhs: Word) {
        for (l, r) in [(lhs.clone(), rhs.clone()), (rhs, lhs)] {
            let first = l[0] as usize;
            self.moves_by_first[first].push(self.moves.len());
            self.moves.push((l, r));
        }
    }

    /// Expand inverse symbols over inverse-free words; other symbols pass
    /// through. Words stay unreduced.
    pub fn linearize(&self, w: &Word) -> LinComb<F> {
        let mut acc: LinComb<F> = lin_single(Vec::new());
        for &g in w {
            if let Some(exp) = self.inv_expansion.get(&g) {
                let mut next: LinComb<F> = BTreeMap::new();
                for (prefix, c) in &acc {
                    for (ec, ew) in exp {
                        let mut nw = prefix.clone();
                        nw.extend_from_slice(ew);
                        let entry = next.entry(nw).or_insert_with(F::zero);
                        *entry = entry.add(&c.mul(ec));
                    }
                }
                next.retain(|_, c| !c.is_zero());
                acc = next;
            } else {
                let mut next: LinComb<F> = BTreeMap::new();
                for (prefix, c) in acc {
                    let mut nw = prefix;
                    nw.push(g);
                    next.insert(nw, c);
                }
                acc = next;
            }
        }
        acc
    }
}

enum Step<F> {
    Rewrite(Vec<(F, Word)>),
    Canon(Word),
    Irreducible,
}

/// Memoizing reducer over one RuleSet.
pub struct Rewriter<F: Field> {
    pub rs: RuleSet<F>,
    memo: HashMap<Word, Rc<LinComb<F>>>,
}

impl<F: Field> Rewriter<F> {
    pub fn new(rs: RuleSet<F>) -> Self {
        Rewriter {
            rs,
            memo: HashMap::new(),
        }
    }

    /// Leftmost redex; at a position, longest pattern wins, then rule order.
    fn direct_rewrite(&self, w: &Word) -> Option<Vec<(F, Word)>> {
        for i in 0..w.len() {
            let mut best: Option<usize> = None;
            for &ri in &self.rs.by_first[w[i] as usize] {
                let pat = &self.rs.rules[ri].pattern;
                if pat.len() <= w.len() - i && w[i..i + pat.len()] == pat[..] {
                    match best {
                        Some(b) if self.rs.rules[b].pattern.len() >= pat.len() => {}
                        _ => best = Some(ri),
                    }
                }
            }
            if let Some(ri) = best {
                let rule = &self.rs.rules[ri];
                let terms = rule
                    .rhs
                    .iter()
                    .map(|(c, r)| {
                        let mut nw = Vec::with_capacity(w.len() - rule.pattern.len() + r.len());
                        nw.extend_from_slice(&w[..i]);
                        nw.extend_from_slice(r);
                        nw.extend_from_slice(&w[i + rule.pattern.len()..]);
                        (c.clone(), nw)
                    })
                    .collect();
                return Some(terms);
            }
        }
        None
    }

    fn neighbors(&self, v: &Word, out: &mut Vec<Word>) {
        out.clear();
        for i in 0..v.len() {
            for &mi in &self.rs.moves_by_first[v[i] as usize] {
                let (l, r) = &self.rs.moves[mi];
                if l.len() <= v.len() - i && v[i..i + l.len()] == l[..] {
                    let mut u = Vec::with_capacity(v.len());
                    u.extend_from_slice(&v[..i]);
                    u.extend_from_slice(r);
                    u.extend_from_slice(&v[i + l.len()..]);
                    out.push(u);
                }
            }
        }
    }

    fn step(&self, w: &Word) -> Step<F> {
        if let Some(terms) = self.direct_rewrite(w) {
            return Step::Rewrite(terms);
        }
        if w.len() < 2 || self.rs.moves.is_empty() {
            return Step::Irreducible;
        }
        let mut visited: HashSet<Word> = HashSet::new();
        let mut queue: VecDeque<(Word, usize)> = VecDeque::new();
        let mut least = w.clone();
        visited.insert(w.clone());
        queue.push_back((w.clone(), 0));
        let mut buf = Vec::new();
        while let Some((v, d)) = queue.pop_front() {
            if d >= self.rs.search_depth {
                continue;
            }
            self.neighbors(&v, &mut buf);
            for u in buf.drain(..) {
                if visited.contains(&u) {
                    continue;
                }
                if let Some(terms) = self.direct_rewrite(&u) {
                    return Step::Rewrite(terms);
                }
                if u < least {
                    least = u.clone();
                }
                visited.insert(u.clone());
                if visited.len() >= self.rs.search_cap {
                    queue.clear();
                    break;
                }
                queue.push_back((u, d + 1));
            }
        }
        if least != *w {
            Step::Canon(least)
        } else {
            Step::Irreducible
        }
    }

    /// Fully reduce an inverse-free word to its canonical combination.
    pub fn canon(&mut self, w: &Word) -> Rc<LinComb<F>> {
        if let Some(hit) = self.memo.get(w) {
            return hit.clone();
        }
        let result = match self.step(w) {
            Step::Rewrite(terms) => {
                let mut acc: LinComb<F> = BTreeMap::new();
                for (c, t) in terms {
                    let sub = self.canon(&t);
                    lin_add_scaled(&mut acc, &sub, &c);
                }
                acc
            }
            Step::Canon(target) => (*self.canon(&target)).clone(),
            Step::Irreducible => lin_single(w.clone()),
        };
        let rc = Rc::new(result);
        if self.memo.len() < MEMO_CAP {
            self.memo.insert(w.clone(), rc.clone());
        }
        rc
    }

    /// Linearize inverse symbols, then reduce every term.
    pub fn reduce(&mut self, w: &Word) -> LinComb<F> {
        let lin = self.rs.linearize(w);
        let mut acc: LinComb<F> = BTreeMap::new();
        for (t, c) in lin {
            let sub = self.canon(&t);
            lin_add_scaled(&mut acc, &sub, &c);
        }
        acc
    }

    /// Reduce the concatenation of two inverse-free words.
    pub fn reduce_concat(&mut self, a: &Word, b: &Word) -> LinComb<F> {
        let mut w = Vec::with_capacity(a.len() + b.len());
        w.extend_from_slice(a);
        w.extend_from_slice(b);
        (*self.canon(&w)).clone()
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

fn apply_and_canon<F: Field>(
    rw: &mut Rewriter<F>,
    w: &Word,
    at: usize,
    plen: usize,
    rhs: &[(F, Word)],
) -> LinComb<F> {
    let mut acc: LinComb<F> = BTreeMap::new();
    for (c, r) in rhs {
        let mut nw = Vec::with_capacity(w.len() - plen + r.len());
        nw.extend_from_slice(&w[..at]);
        nw.extend_from_slice(r);
        nw.extend_from_slice(&w[at + plen..]);
        let sub = rw.canon(&nw);
        lin_add_scaled(&mut acc, &sub, c);
    }
    acc
}

/// Numeric Knuth–Bendix-style completion modulo the move set. Every
/// overlapping superposition of two rules (or of a move with a rule) is
/// reduced along both branches; a nonzero difference is a valid identity
/// whose graded-largest word becomes a new oriented rule. Repeats until no
/// overlap diverges. Completion happens per parameter point, so new rule
/// coefficients are plain field elements.
pub fn complete_ruleset<F: Field>(rs: RuleSet<F>, context: &str) -> Result<RuleSet<F>> {
    if rs.move_list().is_empty() {
        complete_ruleset_incremental(rs, context)
    } else {
        complete_ruleset_batch(rs, context)
    }
}

/// Batch completion for systems that carry length-preserving moves: each
/// round superposes every rule/move pair against a snapshot of the system,
/// so the orbit search stays coherent within a round.
fn complete_ruleset_batch<F: Field>(mut rs: RuleSet<F>, context: &str) -> Result<RuleSet<F>> {
    const MAX_ROUNDS: usize = 60;
    const MAX_RULES: usize = 1200;
    let timing = std::env::var_os("JUCYS_TIMING").is_some();
    let mut watermark = 0usize;
    for _round in 0..MAX_ROUNDS {
        let round_start = std::time::Instant::now();
        let mut rw = Rewriter::new(rs.clone());
        let moves = rs.move_list();
        let move_count = moves.len();
        let mut items: Vec<(Word, Vec<(F, Word)>)> = moves
            .into_iter()
            .map(|(l, r)| (l, vec![(F::one(), r)]))
            .collect();
        items.extend(rs.rule_list());
        let total = items.len();
        let mut additions: Vec<(Word, Vec<(F, Word)>)> = Vec::new();
        let mut seen_patterns: HashSet<Word> = HashSet::new();
        for i in 0..total {
            for j in 0..total {
                if i < watermark && j < watermark {
                    continue; // this pair already joined in an earlier round
                }
                if i < move_count && j < move_count {
                    continue; // move/move superpositions are handled by orbit search
                }
                let p1len = items[i].0.len();
                for pos2 in 0..p1len {
                    if i == j && pos2 == 0 {
                        continue;
                    }
                    let (p1, r1) = &items[i];
                    let (p2, r2) = &items[j];
                    let ov = std::cmp::min(p1.len() - pos2, p2.len());
                    if (0..ov).any(|t| p1[pos2 + t] != p2[t]) {
                        continue;
                    }
                    let mut w = p1.clone();
                    if pos2 + p2.len() > p1.len() {
                        w.extend_from_slice(&p2[ov..]);
                    }
                    let c1 = apply_and_canon(&mut rw, &w, 0, p1.len(), r1);
                    let c2 = apply_and_canon(&mut rw, &w, pos2, p2.len(), r2);
                    if c1 == c2 {
                        continue;
                    }
                    let mut diff = c1;
                    let minus = F::one().neg();
                    lin_add_scaled(&mut diff, &c2, &minus);
                    diff.retain(|_, c| !c.is_zero());
                    let pat = diff
                        .keys()
                        .max_by(|a, b| crate::word::graded_cmp(a, b))
                        .cloned()
                        .expect("nonzero difference has a largest word");
                    if pat.is_empty() {
                        return Err(Error::Other(format!(
                            "completion for `{context}` derived 1 = 0; inconsistent system"
                        )));
                    }
                    if seen_patterns.contains(&pat) {
                        continue;
                    }
                    let lead = diff.get(&pat).cloned().expect("leading coefficient");
                    let lead_inv = lead.inv().expect("leading coefficient invertible");
                    let rhs: Vec<(F, Word)> = diff
                        .iter()
                        .filter(|(k, _)| **k != pat)
                        .map(|(k, c)| (c.mul(&lead_inv).neg(), k.clone()))
                        .collect();
                    seen_patterns.insert(pat.clone());
                    additions.push((pat, rhs));
                }
            }
        }
        if timing {
            eprintln!(
                "[timing] completion `{context}` round {_round}: {} rules, +{} minted, {:?} (memo {})",
                total - move_count,
                additions.len(),
                round_start.elapsed(),
                rw.memo_len()
            );
            if std::env::var("JUCYS_TIMING").as_deref() == Ok("verbose") {
                for (pat, rhs) in additions.iter().take(60) {
                    eprintln!(
                        "    minted: {} -> {} terms, rhs lens {:?}",
                        rs.gens.word_string(pat),
                        rhs.len(),
                        rhs.iter().map(|(_, w)| w.len()).take(8).collect::<Vec<_>>()
                    );
                }
            }
        }
        if additions.is_empty() {
            return Ok(rs);
        }
        for (pat, rhs) in additions {
            rs.add_rule(pat, rhs);
        }
        if rs.rule_list().len() + move_count > MAX_RULES {
            return Err(Error::CompletionDiverged {
                presentation: context.to_string(),
            });
        }
        watermark = total;
    }
    Err(Error::CompletionDiverged {
        presentation: context.to_string(),
    })
}

struct KbRule<F> {
    pattern: Word,
    rhs: Vec<(F, Word)>,
    active: bool,
}

/// Live rule store for incremental completion: rules are activated the
/// moment they are minted and deactivated when a newer rule subsumes their
/// pattern, with the memo invalidated on every change.
struct KbState<F: Field> {
    rules: Vec<KbRule<F>>,
    by_first: Vec<Vec<usize>>,
    memo: HashMap<Word, Rc<LinComb<F>>>,
}

impl<F: Field> KbState<F> {
    /// Leftmost redex over the active rules; longest pattern wins at a tie.
    fn find_redex(&self, w: &Word) -> Option<(usize, usize)> {
        for i in 0..w.len() {
            let mut best: Option<usize> = None;
            for &ri in &self.by_first[w[i] as usize] {
                let r = &self.rules[ri];
                if !r.active {
                    continue;
                }
                if r.pattern.len() <= w.len() - i && w[i..i + r.pattern.len()] == r.pattern[..] {
                    match best {
                        Some(b) if self.rules[b].pattern.len() >= r.pattern.len() => {}
                        _ => best = Some(ri),
                    }
                }
            }
            if let Some(ri) = best {
                return Some((i, ri));
            }
        }
        None
    }

    fn canon(&mut self, w: &Word) -> Rc<LinComb<F>> {
        if let Some(hit) = self.memo.get(w) {
            return hit.clone();
        }
        let result = match self.find_redex(w) {
            Some((pos, ri)) => {
                let plen = self.rules[ri].pattern.len();
                let rhs = self.rules[ri].rhs.clone();
                let mut acc: LinComb<F> = BTreeMap::new();
                for (c, r) in &rhs {
                    let mut nw = Vec::with_capacity(w.len() - plen + r.len());
                    nw.extend_from_slice(&w[..pos]);
                    nw.extend_from_slice(r);
                    nw.extend_from_slice(&w[pos + plen..]);
                    let sub = self.canon(&nw);
                    lin_add_scaled(&mut acc, &sub, c);
                }
                acc
            }
            None => lin_single(w.clone()),
        };
        let rc = Rc::new(result);
        if self.memo.len() < MEMO_CAP {
            self.memo.insert(w.clone(), rc.clone());
        }
        rc
    }

    /// Reduce a claimed identity `sum c_w w = 0` to irreducible support.
    fn reduce_identity(&mut self, lin: &LinComb<F>) -> LinComb<F> {
        let mut acc: LinComb<F> = BTreeMap::new();
        for (w, c) in lin {
            let sub = self.canon(w);
            lin_add_scaled(&mut acc, &sub, c);
        }
        acc
    }

    /// The stored identity of a rule, as `pattern - rhs = 0`.
    fn rule_identity(&self, ri: usize) -> LinComb<F> {
        let mut lin: LinComb<F> = BTreeMap::new();
        lin.insert(self.rules[ri].pattern.clone(), F::one());
        for (c, w) in &self.rules[ri].rhs {
            let entry = lin.entry(w.clone()).or_insert_with(F::zero);
            *entry = entry.add(&c.neg());
        }
        lin.retain(|_, c| !c.is_zero());
        lin
    }
}

fn contains_subword(haystack: &Word, needle: &Word) -> bool {
    needle.len() <= haystack.len() && haystack.windows(needle.len()).any(|w| w == &needle[..])
}

/// Incremental Knuth–Bendix completion for move-free systems. Critical pairs
/// are processed smallest-first from a priority queue; a nonzero difference
/// is oriented on its graded-largest word and becomes active immediately.
/// Activating a rule deactivates every rule whose pattern it subsumes — the
/// deactivated identities re-enter the pipeline so no content is lost — and
/// queues the new rule's critical pairs. The loop ends when no pair or
/// pending identity remains, which certifies local confluence of the active
/// set; paired with the strict graded decrease of every rule this yields
/// unique normal forms.
fn complete_ruleset_incremental<F: Field>(rs: RuleSet<F>, context: &str) -> Result<RuleSet<F>> {
    const MAX_ACTIVE: usize = 1500;
    const MAX_PAIRS: usize = 500_000;
    let timing = std::env::var_os("JUCYS_TIMING").is_some();
    let t0 = std::time::Instant::now();

    let mut st = KbState {
        rules: Vec::new(),
        by_first: vec![Vec::new(); rs.gens.len()],
        memo: HashMap::new(),
    };
    // Pending identities (`sum c_w w = 0`) awaiting re-reduction; pairs of
    // active rules awaiting superposition, smallest total pattern length
    // first.
    let mut pending: VecDeque<LinComb<F>> = VecDeque::new();
    let mut heap: BinaryHeap<(Reverse<usize>, usize, usize)> = BinaryHeap::new();

    let mut seed_rules = rs.rule_list();
    seed_rules.sort_by(|a, b| crate::word::graded_cmp(&a.0, &b.0));
    for (pattern, rhs) in seed_rules {
        let mut lin: LinComb<F> = BTreeMap::new();
        lin.insert(pattern, F::one());
        for (c, w) in &rhs {
            let entry = lin.entry(w.clone()).or_insert_with(F::zero);
            *entry = entry.add(&c.neg());
        }
        lin.retain(|_, c| !c.is_zero());
        pending.push_back(lin);
    }

    let mut minted = 0usize;
    let mut processed_pairs = 0usize;
    loop {
        let diff = if let Some(lin) = pending.pop_front() {
            st.reduce_identity(&lin)
        } else if let Some((_, i, j)) = heap.pop() {
            if !st.rules[i].active || !st.rules[j].active {
                continue;
            }
            processed_pairs += 1;
            if processed_pairs > MAX_PAIRS {
                return Err(Error::CompletionDiverged {
                    presentation: context.to_string(),
                });
            }
            // All superpositions of rule j's pattern starting inside rule
            // i's pattern; every divergent one becomes a pending identity.
            let p1 = st.rules[i].pattern.clone();
            let r1 = st.rules[i].rhs.clone();
            let p2 = st.rules[j].pattern.clone();
            let r2 = st.rules[j].rhs.clone();
            let mut found: Option<LinComb<F>> = None;
            for pos2 in 0..p1.len() {
                if i == j && pos2 == 0 {
                    continue;
                }
                let ov = std::cmp::min(p1.len() - pos2, p2.len());
                if (0..ov).any(|t| p1[pos2 + t] != p2[t]) {
                    continue;
                }
                let mut w = p1.clone();
                if pos2 + p2.len() > p1.len() {
                    w.extend_from_slice(&p2[ov..]);
                }
                let mut c1: LinComb<F> = BTreeMap::new();
                for (c, r) in &r1 {
                    let mut nw = Vec::with_capacity(w.len() - p1.len() + r.len());
                    nw.extend_from_slice(r);
                    nw.extend_from_slice(&w[p1.len()..]);
                    let sub = st.canon(&nw);
                    lin_add_scaled(&mut c1, &sub, c);
                }
                let mut c2: LinComb<F> = BTreeMap::new();
                for (c, r) in &r2 {
                    let mut nw = Vec::with_capacity(w.len() - p2.len() + r.len());
                    nw.extend_from_slice(&w[..pos2]);
                    nw.extend_from_slice(r);
                    nw.extend_from_slice(&w[pos2 + p2.len()..]);
                    let sub = st.canon(&nw);
                    lin_add_scaled(&mut c2, &sub, c);
                }
                if c1 == c2 {
                    continue;
                }
                let minus = F::one().neg();
                lin_add_scaled(&mut c1, &c2, &minus);
                c1.retain(|_, c| !c.is_zero());
                if !c1.is_empty() {
                    found = Some(c1);
                    break;
                }
            }
            match found {
                Some(d) => {
                    // Re-queue the pair: later superpositions of the same
                    // pair are re-examined after the new rule lands.
                    heap.push((Reverse(p1.len() + p2.len()), i, j));
                    d
                }
                None => continue,
            }
        } else {
            break;
        };

        if diff.is_empty() {
            continue;
        }
        // Orient the difference on its graded-largest word.
        let pat = diff
            .keys()
            .max_by(|a, b| crate::word::graded_cmp(a, b))
            .cloned()
            .expect("nonzero difference has a largest word");
        if pat.is_empty() {
            return Err(Error::Other(format!(
                "completion for `{context}` derived 1 = 0; inconsistent system"
            )));
        }
        if let Some(&existing) = st
            .by_first
            .get(pat[0] as usize)
            .and_then(|b| b.iter().find(|&&ri| st.rules[ri].active && st.rules[ri].pattern == pat))
        {
            // Same leading word as an active rule: their difference is a
            // strictly smaller identity; push it back instead of duplicating.
            let lead = diff.get(&pat).cloned().expect("leading coefficient");
            let lead_inv = lead.inv().expect("field coefficient invertible");
            let mut smaller: LinComb<F> = BTreeMap::new();
            for (w, c) in &diff {
                if *w != pat {
                    smaller.insert(w.clone(), c.mul(&lead_inv));
                }
            }
            // diff/lead says pat = -sum smaller; existing says pat = rhs.
            for (c, w) in &st.rules[existing].rhs {
                let entry = smaller.entry(w.clone()).or_insert_with(F::zero);
                *entry = entry.add(c);
            }
            smaller.retain(|_, c| !c.is_zero());
            if !smaller.is_empty() {
                pending.push_back(smaller);
            }
            continue;
        }

        let lead = diff.get(&pat).cloned().expect("leading coefficient");
        let lead_inv = lead.inv().expect("field coefficient invertible");
        let rhs: Vec<(F, Word)> = diff
            .iter()
            .filter(|(k, _)| **k != pat)
            .map(|(k, c)| (c.mul(&lead_inv).neg(), k.clone()))
            .collect();
        let idx = st.rules.len();
        st.by_first[pat[0] as usize].push(idx);
        st.rules.push(KbRule {
            pattern: pat.clone(),
            rhs,
            active: true,
        });
        st.memo.clear();
        minted += 1;

        // Subsumption: retire every active rule whose pattern contains the
        // new pattern; its identity re-enters the pipeline.
        for ri in 0..idx {
            if st.rules[ri].active
                && contains_subword(&st.rules[ri].pattern, &pat)
            {
                st.rules[ri].active = false;
                pending.push_back(st.rule_identity(ri));
            }
        }

        let active_count = st.rules.iter().filter(|r| r.active).count();
        if active_count > MAX_ACTIVE {
            return Err(Error::CompletionDiverged {
                presentation: context.to_string(),
            });
        }
        for ri in 0..st.rules.len() {
            if !st.rules[ri].active {
                continue;
            }
            let w = st.rules[ri].pattern.len() + pat.len();
            heap.push((Reverse(w), idx, ri));
            if ri != idx {
                heap.push((Reverse(w), ri, idx));
            }
        }
    }

    // Re-reduce every surviving right-hand side against the final system so
    // downstream table construction starts from tight rules.
    let mut out = RuleSet::empty(rs.gens.clone());
    out.inv_expansion = rs.inv_expansion.clone();
    out.search_depth = rs.search_depth;
    out.search_cap = rs.search_cap;
    let active: Vec<usize> = (0..st.rules.len())
        .filter(|&ri| st.rules[ri].active)
        .collect();
    for &ri in &active {
        let mut acc: LinComb<F> = BTreeMap::new();
        for (c, w) in &st.rules[ri].rhs.clone() {
            let sub = st.canon(w);
            lin_add_scaled(&mut acc, &sub, c);
        }
        let rhs: Vec<(F, Word)> = acc.into_iter().map(|(w, c)| (c, w)).collect();
        out.add_rule(st.rules[ri].pattern.clone(), rhs);
    }
    if timing {
        eprintln!(
            "[timing] completion `{context}`: {} active rules ({} minted, {} pairs) in {:?}",
            active.len(),
            minted,
            processed_pairs,
            t0.elapsed()
        );
    }
    Ok(out)
}

/// Rule completion for systems whose coefficients live in a ring where some
/// elements are not invertible (polynomial coefficients). Differences whose
/// graded-largest coefficient is invertible are oriented into new rules as
/// usual; the others cannot be oriented and are collected as constraints:
/// identities `sum coeff_w * w = 0` that must hold in any quotient where the
/// system is consistent. Pairs with both indices below `initial_watermark`
/// (a prefix already known confluent) are never superposed. Moves are not
/// supported: callers pass fully rule-oriented systems.
pub fn complete_with_constraints<F: Field>(
    mut rs: RuleSet<F>,
    initial_watermark: usize,
    context: &str,
) -> Result<(RuleSet<F>, Vec<LinComb<F>>)> {
    const MAX_ROUNDS: usize = 60;
    const MAX_RULES: usize = 2000;
    assert!(
        rs.move_list().is_empty(),
        "constraint completion expects rule-oriented systems"
    );
    let mut constraints: Vec<LinComb<F>> = Vec::new();
    let mut constrained_pairs: HashSet<(usize, usize, usize)> = HashSet::new();
    let mut watermark = initial_watermark;
    for _round in 0..MAX_ROUNDS {
        let mut rw = Rewriter::new(rs.clone());
        let items = rs.rule_list();
        let total = items.len();
        let mut additions: Vec<(Word, Vec<(F, Word)>)> = Vec::new();
        let mut seen_patterns: HashSet<Word> = HashSet::new();
        for i in 0..total {
            for j in 0..total {
                if i < watermark && j < watermark {
                    continue;
                }
                let p1len = items[i].0.len();
                for pos2 in 0..p1len {
                    if i == j && pos2 == 0 {
                        continue;
                    }
                    if constrained_pairs.contains(&(i, j, pos2)) {
                        continue;
                    }
                    let (p1, r1) = &items[i];
                    let (p2, r2) = &items[j];
                    let ov = std::cmp::min(p1.len() - pos2, p2.len());
                    if (0..ov).any(|t| p1[pos2 + t] != p2[t]) {
                        continue;
                    }
                    let mut w = p1.clone();
                    if pos2 + p2.len() > p1.len() {
                        w.extend_from_slice(&p2[ov..]);
                    }
                    let c1 = apply_and_canon(&mut rw, &w, 0, p1.len(), r1);
                    let c2 = apply_and_canon(&mut rw, &w, pos2, p2.len(), r2);
                    if c1 == c2 {
                        continue;
                    }
                    let mut diff = c1;
                    let minus = F::one().neg();
                    lin_add_scaled(&mut diff, &c2, &minus);
                    diff.retain(|_, c| !c.is_zero());
                    let pat = diff
                        .keys()
                        .max_by(|a, b| crate::word::graded_cmp(a, b))
                        .cloned()
                        .expect("nonzero difference has a largest word");
                    let lead = diff.get(&pat).cloned().expect("leading coefficient");
                    let lead_inv = match lead.inv() {
                        Some(x) => x,
                        None => {
                            // Not orientable over this coefficient ring; the
                            // difference itself is the derived information.
                            constrained_pairs.insert((i, j, pos2));
                            constraints.push(diff);
                            continue;
                        }
                    };
                    if pat.is_empty() {
                        return Err(Error::Other(format!(
                            "completion for `{context}` derived 1 = 0; inconsistent system"
                        )));
                    }
                    if seen_patterns.contains(&pat) {
                        continue;
                    }
                    let rhs: Vec<(F, Word)> = diff
                        .iter()
                        .filter(|(k, _)| **k != pat)
                        .map(|(k, c)| (c.mul(&lead_inv).neg(), k.clone()))
                        .collect();
                    seen_patterns.insert(pat.clone());
                    additions.push((pat, rhs));
                }
            }
        }
        if additions.is_empty() {
            return Ok((rs, constraints));
        }
        for (pat, rhs) in additions {
            rs.add_rule(pat, rhs);
        }
        if rs.rule_list().len() > MAX_RULES {
            return Err(Error::CompletionDiverged {
                presentation: context.to_string(),
            });
        }
        watermark = total;
    }
    Err(Error::CompletionDiverged {
        presentation: context.to_string(),
    })
}

/// Instantiate rules at a parameter point, verifying the presentation guards.
pub fn instantiate_checked<F: Field>(
    pres: &Presentation,
    env: &BTreeMap<String, F>,
) -> Result<RuleSet<F>> {
    for g in &pres.guards {
        let e = crate::expr::Expr::parse(g)?;
        match e.eval(env) {
            Ok(v) if !v.is_zero() => {}
            _ => {
                return Err(Error::InadmissiblePoint {
                    constraint: format!("guard `{g}` vanishes for `{}`", pres.name),
                })
            }
        }
    }
    RuleSet::instantiate(pres, env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Presentation;
    use crate::scalar::{rat_i, Rat};
    use crate::word::GeneratorSet;

    fn toy_rewriter() -> Rewriter<Rat> {
        // t^2 = 1, u free, t and u commute.
        let gens = GeneratorSet::build(&[("t", false), ("u", false)]);
        let mut p = Presentation::new("toy", gens);
        p.rule("tt", "t t", &[("1", "1")]).unwrap();
        p.mv("comm", "u t", "t u").unwrap();
        let rs = RuleSet::instantiate(&p, &BTreeMap::new()).unwrap();
        Rewriter::new(rs)
    }

    #[test]
    fn reduces_through_moves() {
        let mut rw = toy_rewriter();
        // u t u t -> (comm) t u u t -> ... -> t t u u -> u u
        let w = vec![1u8, 0, 1, 0];
        let lin = rw.canon(&w);
        assert_eq!(lin.len(), 1);
        let (word, coeff) = lin.iter().next().unwrap();
        assert_eq!(word, &vec![1u8, 1]);
        assert_eq!(coeff, &rat_i(1));
    }

    #[test]
    fn canonicalizes_orbit_least() {
        let mut rw = toy_rewriter();
        // u t has orbit {u t, t u}; canonical representative is t u.
        let lin = rw.canon(&vec![1u8, 0]);
        assert_eq!(lin.len(), 1);
        assert!(lin.contains_key(&vec![0u8, 1]));
    }

    #[test]
    fn linearize_expands_inverses() {
        let gens = GeneratorSet::build(&[("t", true)]);
        let mut p = Presentation::new("grp", gens);
        // t^3 = 1, so t^-1 = t^2 is NOT length-reducing; use t^2 with rule t^3 -> 1.
        p.rule("ttt", "t t t", &[("1", "1")]).unwrap();
        p.inverse_expansion("t", &[("1", "t t")]).unwrap();
        let rs = RuleSet::<Rat>::instantiate(&p, &BTreeMap::new()).unwrap();
        let mut rw = Rewriter::new(rs);
        // t^-1 t = t^2 t = t^3 = 1.
        let w = vec![1u8, 0];
        let lin = rw.reduce(&w);
        assert_eq!(lin, lin_single::<Rat>(vec![]));
    }
}
