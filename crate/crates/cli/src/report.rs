use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// Everything a command reports. Identical inputs give identical documents
/// apart from `timing_ms`.
#[derive(Debug, Serialize)]
pub struct ResultsDocument {
    pub command: String,
    pub inputs_digest: String,
    pub checks: Vec<Check>,
    /// Verdicts that are reported but are not pass/fail criteria.
    pub facts: BTreeMap<String, String>,
    pub renderings: BTreeMap<String, String>,
    pub witnesses: Vec<String>,
    pub timing_ms: u128,
}

pub fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl ResultsDocument {
    pub fn new(command: &str, inputs_digest: String) -> Self {
        ResultsDocument {
            command: command.to_string(),
            inputs_digest,
            checks: vec![],
            facts: BTreeMap::new(),
            renderings: BTreeMap::new(),
            witnesses: vec![],
            timing_ms: 0,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn fact(&mut self, name: impl Into<String>, value: impl ToString) {
        self.facts.insert(name.into(), value.to_string());
    }

    pub fn render(&mut self, name: impl Into<String>, value: impl ToString) {
        self.renderings.insert(name.into(), value.to_string());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(s, "inputs: sha256:{}", self.inputs_digest);
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                let _ = writeln!(s, "{verdict} {}", c.name);
            } else {
                let _ = writeln!(s, "{verdict} {}: {}", c.name, c.detail);
            }
        }
        for (k, v) in &self.facts {
            let _ = writeln!(s, "{k}: {v}");
        }
        for (k, v) in &self.renderings {
            let _ = writeln!(s, "--- {k}\n{}", v.trim_end());
        }
        for w in &self.witnesses {
            let _ = writeln!(s, "witness: {w}");
        }
        let _ = writeln!(s, "result: {}", if self.passed() { "PASS" } else { "FAIL" });
        let _ = writeln!(s, "time: {} ms", self.timing_ms);
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
