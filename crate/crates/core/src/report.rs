//! Deterministic check reports: one line per verified law, exact pass/fail,
//! serialized to byte-stable JSON (sorted keys, no floats).

use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    /// Short slug naming the law or identity being checked.
    pub law: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn new(suite: &str, seed: u64, trials: usize) -> Self {
        CheckReport {
            suite: suite.to_string(),
            seed,
            trials,
            items: Vec::new(),
        }
    }

    pub fn push(&mut self, law: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.items.push(CheckItem {
            law: law.into(),
            ok,
            detail: detail.into(),
        });
    }

    pub fn pass(&mut self, law: impl Into<String>) {
        self.push(law, true, "exact");
    }

    pub fn merge(&mut self, other: CheckReport) {
        for item in other.items {
            self.items.push(CheckItem {
                law: format!("{}/{}", other.suite, item.law),
                ok: item.ok,
                detail: item.detail,
            });
        }
    }

    pub fn all_ok(&self) -> bool {
        self.items.iter().all(|i| i.ok)
    }

    pub fn failures(&self) -> Vec<&CheckItem> {
        self.items.iter().filter(|i| !i.ok).collect()
    }

    /// Byte-stable JSON: field order is fixed by the struct definitions.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} (seed {}, trials {})", self.suite, self.seed, self.trials)?;
        for item in &self.items {
            writeln!(
                f,
                "  [{}] {} — {}",
                if item.ok { "ok" } else { "FAIL" },
                item.law,
                item.detail
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_deterministic() {
        let mut r = CheckReport::new("demo", 5, 1);
        r.pass("first-law");
        r.push("second-law", false, "off by one term");
        let a = r.to_json();
        let b = r.to_json();
        assert_eq!(a, b);
        assert!(!r.all_ok());
        assert_eq!(r.failures().len(), 1);
    }
}
