use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// Basis indices and/or vectors exhibiting a failed condition.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Witness {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub indices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vectors: Vec<Vec<f64>>,
}

impl Witness {
    pub fn indices(indices: Vec<usize>) -> Self {
        Self { indices, vectors: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub id: String,
    pub description: String,
    pub passed: bool,
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Per-condition verdicts. `verdict` is `Pass` iff every item passed and the
/// report is sound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub sound: bool,
    pub items: Vec<CheckItem>,
    /// Named derived quantities, e.g. the conformal functional on `a`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub quantities: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub(crate) fn new() -> Self {
        Self {
            verdict: Verdict::Pass,
            sound: true,
            items: Vec::new(),
            quantities: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn push(
        &mut self,
        id: &str,
        description: &str,
        residual: f64,
        tol: f64,
        witness: Option<Witness>,
    ) {
        let passed = residual <= tol;
        self.items.push(CheckItem {
            id: id.to_string(),
            description: description.to_string(),
            passed,
            residual,
            witness: if passed { None } else { witness },
        });
        self.refresh();
    }

    pub(crate) fn refresh(&mut self) {
        self.verdict = if self.sound && self.items.iter().all(|i| i.passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    pub fn item(&self, id: &str) -> Option<&CheckItem> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn failed_ids(&self) -> Vec<&str> {
        self.items.iter().filter(|i| !i.passed).map(|i| i.id.as_str()).collect()
    }
}
