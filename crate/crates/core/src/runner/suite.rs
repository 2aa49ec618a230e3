use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RunnerError;
use crate::frontend::Program;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
const MASS_TOLERANCE: f64 = 1e-9;

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

/// A distribution assertion on the program's classical output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCase {
    pub name: String,
    /// Bitstring (highest clbit first) to probability.
    pub expected: BTreeMap<String, f64>,
    /// Pass iff total variation distance is at most this.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Initial computational basis state, written like an output bitstring
    /// over the qubits (highest qubit first). All zeros when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl TestCase {
    pub fn new(name: impl Into<String>, expected: &[(&str, f64)]) -> Self {
        TestCase {
            name: name.into(),
            expected: expected.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            tolerance: DEFAULT_TOLERANCE,
            input: None,
            shots: None,
            seed: None,
        }
    }

    pub fn with_input(mut self, input: &str) -> Self {
        self.input = Some(input.to_string());
        self
    }

    /// Initial basis state index, already checked by [`TestSuite::check`].
    pub fn initial_state(&self) -> u64 {
        self.input
            .as_deref()
            .map_or(0, |s| u64::from_str_radix(s, 2).unwrap_or(0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSuite {
    pub tests: Vec<TestCase>,
}

impl TestSuite {
    pub fn new(tests: Vec<TestCase>) -> Self {
        TestSuite { tests }
    }

    pub fn len(&self) -> usize {
        self.tests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.tests.iter().map(|t| t.name.clone()).collect()
    }

    pub fn from_json(text: &str) -> Result<Self, RunnerError> {
        serde_json::from_str(text).map_err(|e| RunnerError::SuiteFormat(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, RunnerError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunnerError::SuiteFormat(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite serializes") + "\n"
    }

    /// Validate the suite against the program it will run on.
    pub fn check(&self, p: &Program) -> Result<(), RunnerError> {
        if self.tests.is_empty() {
            return Err(RunnerError::EmptySuite);
        }
        let width = p.clbit_count();
        for t in &self.tests {
            if self.tests.iter().filter(|u| u.name == t.name).count() > 1 {
                return Err(RunnerError::DuplicateTest(t.name.clone()));
            }
            for key in t.expected.keys() {
                if key.len() != width || !key.bytes().all(|b| b == b'0' || b == b'1') {
                    return Err(RunnerError::SuiteShapeMismatch {
                        test: t.name.clone(),
                        detail: format!("outcome `{key}` is not a {width}-bit string"),
                    });
                }
            }
            let mass: f64 = t.expected.values().sum();
            if (mass - 1.0).abs() > MASS_TOLERANCE || t.expected.values().any(|v| *v < 0.0) {
                return Err(RunnerError::SuiteShapeMismatch {
                    test: t.name.clone(),
                    detail: format!("expected probabilities sum to {mass}"),
                });
            }
            if !(0.0..=1.0).contains(&t.tolerance) {
                return Err(RunnerError::SuiteShapeMismatch {
                    test: t.name.clone(),
                    detail: format!("tolerance {} outside [0, 1]", t.tolerance),
                });
            }
            if let Some(input) = &t.input {
                let nq = p.qubit_count();
                if input.len() != nq || !input.bytes().all(|b| b == b'0' || b == b'1') {
                    return Err(RunnerError::SuiteShapeMismatch {
                        test: t.name.clone(),
                        detail: format!("input `{input}` is not a {nq}-bit string"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Total variation distance between two sparse distributions.
pub fn tvd(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let mut sum = 0.0;
    for (k, p) in a {
        sum += (p - b.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, q) in b {
        if !a.contains_key(k) {
            sum += q.abs();
        }
    }
    sum / 2.0
}
