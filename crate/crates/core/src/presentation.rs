//! Finitely presented associative algebras and groups: symbolic rewrite rules
//! (coefficients are expressions in the parameter symbols), length-preserving
//! search moves, and the defining relations used by the homomorphism checker.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::word::{graded_lt, GeneratorSet, Word};

/// Oriented rule: pattern -> linear combination, every term strictly smaller
/// than the pattern in graded length-lex (the orientation witness).
#[derive(Debug, Clone)]
pub struct RuleTemplate {
    pub pattern: Word,
    pub rhs: Vec<(Expr, Word)>,
}

/// Unoriented, length-preserving move (braid, far commutation, four-term);
/// used by the bounded search for hidden redexes, in both directions.
#[derive(Debug, Clone)]
pub struct MoveTemplate {
    pub lhs: Word,
    pub rhs: Word,
}

/// One defining relation: lhs = rhs, both formal linear combinations.
#[derive(Debug, Clone)]
pub struct Relation {
    pub name: String,
    pub lhs: Vec<(Expr, Word)>,
    pub rhs: Vec<(Expr, Word)>,
}

/// Expansion of an inverse symbol over inverse-free words (algebra quotients
/// where generators satisfy low-degree polynomial identities).
#[derive(Debug, Clone)]
pub struct InverseExpansion {
    pub of: u8,
    pub rhs: Vec<(Expr, Word)>,
}

#[derive(Debug, Clone)]
pub struct Presentation {
    pub name: String,
    pub gens: GeneratorSet,
    pub rules: Vec<RuleTemplate>,
    pub moves: Vec<MoveTemplate>,
    pub inverse_expansions: Vec<InverseExpansion>,
    /// Guard expressions that must be nonzero at a usable parameter point.
    pub guards: Vec<String>,
    pub relations: Vec<Relation>,
}

impl Presentation {
    pub fn new(name: &str, gens: GeneratorSet) -> Presentation {
        Presentation {
            name: name.to_string(),
            gens,
            rules: Vec::new(),
            moves: Vec::new(),
            inverse_expansions: Vec::new(),
            guards: Vec::new(),
            relations: Vec::new(),
        }
    }

    fn parse_comb(&self, terms: &[(&str, &str)]) -> Result<Vec<(Expr, Word)>> {
        terms
            .iter()
            .map(|(coeff, word)| Ok((Expr::parse(coeff)?, self.gens.parse_word(word)?)))
            .collect()
    }

    /// Add an oriented rule, checking the orientation witness.
    pub fn rule(&mut self, name: &str, pattern: &str, rhs: &[(&str, &str)]) -> Result<()> {
        let pat = self.gens.parse_word(pattern)?;
        assert!(!pat.is_empty(), "empty pattern in rule {name}");
        let rhs = self.parse_comb(rhs)?;
        for (_, w) in &rhs {
            assert!(
                graded_lt(w, &pat),
                "rule {name}: term `{}` not smaller than pattern `{}`",
                self.gens.word_string(w),
                self.gens.word_string(&pat)
            );
        }
        self.relations.push(Relation {
            name: name.to_string(),
            lhs: vec![(Expr::Int(1), pat.clone())],
            rhs: rhs.clone(),
        });
        self.rules.push(RuleTemplate { pattern: pat, rhs });
        Ok(())
    }

    /// Add a length-preserving move (recorded as a relation too).
    pub fn mv(&mut self, name: &str, lhs: &str, rhs: &str) -> Result<()> {
        let l = self.gens.parse_word(lhs)?;
        let r = self.gens.parse_word(rhs)?;
        assert_eq!(l.len(), r.len(), "move {name} changes length");
        self.relations.push(Relation {
            name: name.to_string(),
            lhs: vec![(Expr::Int(1), l.clone())],
            rhs: vec![(Expr::Int(1), r.clone())],
        });
        self.moves.push(MoveTemplate { lhs: l, rhs: r });
        Ok(())
    }

    /// Declare how an inverse symbol expands over inverse-free words.
    pub fn inverse_expansion(&mut self, of: &str, rhs: &[(&str, &str)]) -> Result<()> {
        let base = self.gens.id(of).ok_or_else(|| Error::UnknownGenerator {
            name: of.to_string(),
            presentation: self.name.clone(),
        })?;
        let inv = self.gens.inverse_id(base).ok_or_else(|| {
            Error::Parse(format!("generator `{of}` is not invertible"))
        })?;
        let rhs = self.parse_comb(rhs)?;
        self.relations.push(Relation {
            name: format!("{of}-inverse"),
            lhs: vec![(Expr::Int(1), vec![inv])],
            rhs: rhs.clone(),
        });
        self.inverse_expansions.push(InverseExpansion { of: inv, rhs });
        Ok(())
    }

    /// Record a relation that is not used for rewriting (groups, or redundant
    /// consequences worth re-checking through the homomorphism checker).
    pub fn relation_only(
        &mut self,
        name: &str,
        lhs: &[(&str, &str)],
        rhs: &[(&str, &str)],
    ) -> Result<()> {
        let l = self.parse_comb(lhs)?;
        let r = self.parse_comb(rhs)?;
        self.relations.push(Relation {
            name: name.to_string(),
            lhs: l,
            rhs: r,
        });
        Ok(())
    }

    pub fn guard(&mut self, g: &str) {
        if !self.guards.iter().any(|h| h == g) {
            self.guards.push(g.to_string());
        }
    }

    /// Far-commutation moves for every pair in `pairs` (both spellings).
    pub fn commuting_pairs(&mut self, pairs: &[(&str, &str)]) -> Result<()> {
        for (a, b) in pairs {
            self.mv(
                &format!("comm {a},{b}"),
                &format!("{a} {b}"),
                &format!("{b} {a}"),
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::GeneratorSet;

    #[test]
    #[should_panic(expected = "not smaller")]
    fn misoriented_rule_panics() {
        let gens = GeneratorSet::build(&[("t", false)]);
        let mut p = Presentation::new("toy", gens);
        p.rule("bad", "t", &[("1", "t t")]).unwrap();
    }

    #[test]
    fn builds_toy_presentation() {
        let gens = GeneratorSet::build(&[("t", false)]);
        let mut p = Presentation::new("toy", gens);
        p.rule("square", "t t", &[("1", "1")]).unwrap();
        assert_eq!(p.rules.len(), 1);
        assert_eq!(p.relations.len(), 1);
    }
}
