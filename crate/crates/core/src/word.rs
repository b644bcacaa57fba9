//! Generator alphabets and monomial words.
//!
//! A word is a sequence of generator ids. Inverses are distinct symbols,
//! ordered after every base symbol so that graded length-lex comparison
//! prefers inverse-free spellings.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BTreeMap;

pub type Word = Vec<u8>;

/// Ordered generator alphabet. Ids are indices into `names`; the id order is
/// the total order used by graded length-lex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    pub names: Vec<String>,
    /// id -> id of its inverse symbol (if the generator is invertible).
    pub inverse: Vec<Option<u8>>,
    /// id -> true when the symbol itself is an inverse symbol.
    pub is_inverse_symbol: Vec<bool>,
    by_name: BTreeMap<String, u8>,
}

impl GeneratorSet {
    /// Build from (name, invertible) pairs. Base symbols take ids in the given
    /// order; inverse symbols are appended afterwards, in the same order.
    pub fn build(base: &[(&str, bool)]) -> GeneratorSet {
        let mut names: Vec<String> = Vec::new();
        let mut inverse: Vec<Option<u8>> = Vec::new();
        let mut is_inv: Vec<bool> = Vec::new();
        for (name, _) in base {
            assert!(
                !names.iter().any(|n| n == name),
                "duplicate generator `{name}`"
            );
            names.push(name.to_string());
            inverse.push(None);
            is_inv.push(false);
        }
        for (i, (name, invertible)) in base.iter().enumerate() {
            if *invertible {
                let inv_id = names.len() as u8;
                names.push(format!("{name}^-1"));
                inverse.push(Some(i as u8));
                is_inv.push(true);
                inverse[i] = Some(inv_id);
            }
        }
        let by_name = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u8))
            .collect();
        GeneratorSet {
            names,
            inverse,
            is_inverse_symbol: is_inv,
            by_name,
        }
    }

    pub fn id(&self, name: &str) -> Option<u8> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: u8) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Ids of all non-inverse symbols.
    pub fn base_ids(&self) -> Vec<u8> {
        (0..self.names.len() as u8)
            .filter(|&i| !self.is_inverse_symbol[i as usize])
            .collect()
    }

    pub fn inverse_id(&self, id: u8) -> Option<u8> {
        self.inverse[id as usize]
    }

    /// Parse a whitespace-separated word like `T0 T1^-1 K1`; `1` or the empty
    /// string denote the unit.
    pub fn parse_word(&self, src: &str) -> Result<Word> {
        let mut w = Vec::new();
        for tok in src.split_whitespace() {
            if tok == "1" {
                continue;
            }
            // Allow `T0^-2` style powers.
            let (base, count) = match tok.find('^') {
                Some(pos) => {
                    let expo: i64 = tok[pos + 1..].parse().map_err(|_| {
                        Error::Parse(format!("bad exponent in token `{tok}`"))
                    })?;
                    (&tok[..pos], expo)
                }
                None => (tok, 1),
            };
            let id = if count < 0 {
                let base_id = self.id(base).ok_or_else(|| Error::UnknownGenerator {
                    name: base.to_string(),
                    presentation: "word parse".into(),
                })?;
                self.inverse_id(base_id).ok_or_else(|| Error::Parse(format!(
                    "generator `{base}` is not invertible"
                )))?
            } else {
                self.id(base).ok_or_else(|| Error::UnknownGenerator {
                    name: base.to_string(),
                    presentation: "word parse".into(),
                })?
            };
            for _ in 0..count.abs() {
                w.push(id);
            }
        }
        Ok(w)
    }

    pub fn word_string(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter()
            .map(|&id| self.name(id))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Group inverse of a word: reverse and invert each symbol.
    pub fn word_inverse(&self, w: &Word) -> Result<Word> {
        let mut out = Vec::with_capacity(w.len());
        for &id in w.iter().rev() {
            let inv = self.inverse_id(id).ok_or_else(|| Error::Parse(format!(
                "cannot invert word containing non-invertible `{}`",
                self.name(id)
            )))?;
            out.push(inv);
        }
        Ok(out)
    }
}

/// Graded length-lex: shorter first, then lexicographic on ids.
pub fn graded_cmp(a: &Word, b: &Word) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub fn graded_lt(a: &Word, b: &Word) -> bool {
    graded_cmp(a, b) == Ordering::Less
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens() -> GeneratorSet {
        GeneratorSet::build(&[("T0", true), ("T1", true), ("K1", false)])
    }

    #[test]
    fn ids_put_inverses_last() {
        let g = gens();
        assert_eq!(g.id("T0"), Some(0));
        assert_eq!(g.id("T1"), Some(1));
        assert_eq!(g.id("K1"), Some(2));
        assert_eq!(g.id("T0^-1"), Some(3));
        assert_eq!(g.id("T1^-1"), Some(4));
        assert_eq!(g.inverse_id(0), Some(3));
        assert_eq!(g.inverse_id(2), None);
        assert_eq!(g.base_ids(), vec![0, 1, 2]);
    }

    #[test]
    fn word_parse_and_print() {
        let g = gens();
        let w = g.parse_word("T0 T1^-1 K1").unwrap();
        assert_eq!(w, vec![0, 4, 2]);
        assert_eq!(g.word_string(&w), "T0 T1^-1 K1");
        assert_eq!(g.parse_word("1").unwrap(), Vec::<u8>::new());
        assert_eq!(g.word_string(&vec![]), "1");
        let p = g.parse_word("T1^2 T0^-2").unwrap();
        assert_eq!(p, vec![1, 1, 3, 3]);
    }

    #[test]
    fn parse_rejects_unknown_and_noninvertible() {
        let g = gens();
        assert!(g.parse_word("T9").is_err());
        assert!(g.parse_word("K1^-1").is_err());
    }

    #[test]
    fn word_inverse_reverses() {
        let g = gens();
        let w = g.parse_word("T0 T1").unwrap();
        assert_eq!(g.word_inverse(&w).unwrap(), g.parse_word("T1^-1 T0^-1").unwrap());
        assert!(g.word_inverse(&g.parse_word("K1").unwrap()).is_err());
    }

    #[test]
    fn graded_order_is_length_first() {
        let a = vec![2u8];
        let b = vec![0u8, 0];
        assert!(graded_lt(&a, &b));
        assert!(graded_lt(&vec![0, 1], &vec![1, 0]));
    }
}
