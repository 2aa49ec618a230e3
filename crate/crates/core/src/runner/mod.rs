//! Test execution over the original program and its mutants.

mod suite;

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::Program;
use crate::mutate::{Mutant, MutationOperator};
use crate::simulator::{self, RunOptions, SimError};
pub use suite::{tvd, TestCase, TestSuite, DEFAULT_TOLERANCE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunnerError {
    #[error("test suite is empty")]
    EmptySuite,
    #[error("test `{test}` does not fit the program: {detail}")]
    SuiteShapeMismatch { test: String, detail: String },
    #[error("test name `{0}` appears more than once")]
    DuplicateTest(String),
    #[error("cannot read test suite: {0}")]
    SuiteFormat(String),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Pass,
    Fail,
    Timeout,
    #[serde(rename = "Error")]
    CrashError,
}

impl Outcome {
    pub fn letter(self) -> char {
        match self {
            Outcome::Pass => 'P',
            Outcome::Fail => 'F',
            Outcome::Timeout => 'T',
            Outcome::CrashError => 'E',
        }
    }

    /// Failing for localization purposes: a crash did not pass either.
    pub fn is_failure(self) -> bool {
        matches!(self, Outcome::Fail | Outcome::CrashError)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Empty for timeouts and crashes.
    pub covered: BTreeSet<usize>,
    /// Present for Pass and Fail.
    pub tvd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    fn from_error(err: &SimError) -> Self {
        let outcome = match err {
            SimError::BudgetExceeded(_) => Outcome::Timeout,
            _ => Outcome::CrashError,
        };
        Verdict {
            outcome,
            covered: BTreeSet::new(),
            tvd: None,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Wall-clock budget for one (version, test) cell.
    pub budget: Duration,
    pub max_branches: usize,
    pub max_qubits: usize,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            budget: simulator::DEFAULT_BUDGET,
            max_branches: simulator::DEFAULT_MAX_BRANCHES,
            max_qubits: simulator::DEFAULT_MAX_QUBITS,
            workers: 1,
        }
    }
}

impl RunConfig {
    fn sim_options(&self, initial_state: u64) -> RunOptions {
        RunOptions {
            max_branches: self.max_branches,
            budget: self.budget,
            max_qubits: self.max_qubits,
            initial_state,
            ..RunOptions::default()
        }
    }

    /// Run `f` on a pool with `workers` threads (inline for one worker).
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T, RunnerError> {
        if self.workers <= 1 {
            return Ok(f());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| RunnerError::Pool(e.to_string()))?;
        Ok(pool.install(f))
    }
}

/// Run every test of `suite` against `p`.
pub fn run_suite(p: &Program, suite: &TestSuite, cfg: &RunConfig) -> Result<Vec<Verdict>, RunnerError> {
    suite.check(p)?;
    Ok(suite_verdicts(p, suite, cfg))
}

// Tests that share an input see the same execution, so each distinct input
// is simulated once.
fn suite_verdicts(p: &Program, suite: &TestSuite, cfg: &RunConfig) -> Vec<Verdict> {
    let mut traces = HashMap::new();
    suite
        .tests
        .iter()
        .map(|t| {
            let init = t.initial_state();
            let trace = traces
                .entry(init)
                .or_insert_with(|| simulator::run(p, &cfg.sim_options(init)));
            match trace {
                Ok(trace) => {
                    let d = tvd(&trace.distribution, &t.expected);
                    Verdict {
                        outcome: if d <= t.tolerance {
                            Outcome::Pass
                        } else {
                            Outcome::Fail
                        },
                        covered: trace.covered.clone(),
                        tvd: Some(d),
                        error: None,
                    }
                }
                Err(e) => Verdict::from_error(e),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    /// `original` or the mutant id.
    pub version: String,
    pub operator: Option<MutationOperator>,
    pub target: Option<usize>,
    pub verdicts: Vec<Verdict>,
    /// Some non-timeout cell passes where the original fails or vice versa.
    pub behavior_changing: bool,
}

impl MatrixRow {
    /// True when any cell timed out, leaving the row without full evidence.
    pub fn timed_out(&self) -> bool {
        self.verdicts.iter().any(|v| v.outcome == Outcome::Timeout)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionMatrix {
    pub tests: Vec<String>,
    /// Row 0 is the original program; mutant rows follow in input order.
    pub rows: Vec<MatrixRow>,
}

pub const ORIGINAL: &str = "original";

impl ExecutionMatrix {
    pub fn original(&self) -> &MatrixRow {
        &self.rows[0]
    }

    pub fn mutant_rows(&self) -> &[MatrixRow] {
        &self.rows[1..]
    }

    pub fn row(&self, version: &str) -> Option<&MatrixRow> {
        self.rows.iter().find(|r| r.version == version)
    }

    /// Rows as `P`/`F`/`T`/`E` letters.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("version");
        for t in &self.tests {
            out.push(',');
            out.push_str(&csv_field(t));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&csv_field(&row.version));
            for v in &row.verdicts {
                let _ = write!(out, ",{}", v.outcome.letter());
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes") + "\n"
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn behavior_changing(original: &[Verdict], mutant: &[Verdict]) -> bool {
    original.iter().zip(mutant).any(|(o, m)| {
        o.outcome != Outcome::Timeout
            && m.outcome != Outcome::Timeout
            && o.passed() != m.passed()
    })
}

/// Execute the suite on `p` and every mutant. Row content does not depend on
/// the number of workers or on scheduling.
pub fn run_matrix(
    p: &Program,
    mutants: &[Mutant],
    suite: &TestSuite,
    cfg: &RunConfig,
) -> Result<ExecutionMatrix, RunnerError> {
    suite.check(p)?;
    cfg.install(|| matrix_in_current_pool(p, mutants, suite, cfg))
}

/// Like [`run_matrix`] but parallelizes on whatever rayon pool is current.
pub(crate) fn matrix_in_current_pool(
    p: &Program,
    mutants: &[Mutant],
    suite: &TestSuite,
    cfg: &RunConfig,
) -> ExecutionMatrix {
    let original = suite_verdicts(p, suite, cfg);
    let mutant_verdicts: Vec<Vec<Verdict>> = mutants
        .par_iter()
        .map(|m| suite_verdicts(&m.program, suite, cfg))
        .collect();
    let mut rows = Vec::with_capacity(mutants.len() + 1);
    rows.push(MatrixRow {
        version: ORIGINAL.to_string(),
        operator: None,
        target: None,
        verdicts: original,
        behavior_changing: false,
    });
    for (m, verdicts) in mutants.iter().zip(mutant_verdicts) {
        let changing = behavior_changing(&rows[0].verdicts, &verdicts);
        rows.push(MatrixRow {
            version: m.id.clone(),
            operator: Some(m.operator),
            target: m.target,
            verdicts,
            behavior_changing: changing,
        });
    }
    ExecutionMatrix {
        tests: suite.names(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;
    use crate::mutate::{generate_mutants, OperatorSet};

    const BELL: &str = "qreg q[2]; creg c[2]; h q[0]; cx q[0],q[1]; \
                        measure q[0] -> c[0]; measure q[1] -> c[1];";

    #[test]
    fn bell_passes_and_fails() {
        let p = parse(BELL).unwrap();
        let suite = TestSuite::new(vec![
            TestCase::new("bell", &[("00", 0.5), ("11", 0.5)]),
            TestCase::new("zero", &[("00", 1.0)]),
        ]);
        let v = run_suite(&p, &suite, &RunConfig::default()).unwrap();
        assert_eq!(v[0].outcome, Outcome::Pass);
        assert!(v[0].tvd.unwrap() < 1e-12);
        assert_eq!(v[1].outcome, Outcome::Fail);
        assert!((v[1].tvd.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(v[0].covered, BTreeSet::from([0, 1, 2, 3]));
    }

    #[test]
    fn width_mismatch() {
        let p = parse(BELL).unwrap();
        let suite = TestSuite::new(vec![TestCase::new("narrow", &[("0", 1.0)])]);
        assert!(matches!(
            run_suite(&p, &suite, &RunConfig::default()),
            Err(RunnerError::SuiteShapeMismatch { .. })
        ));
        let suite = TestSuite::new(vec![TestCase::new("mass", &[("00", 0.7)])]);
        assert!(matches!(
            run_suite(&p, &suite, &RunConfig::default()),
            Err(RunnerError::SuiteShapeMismatch { .. })
        ));
        let suite = TestSuite::new(vec![TestCase::new("in", &[("00", 1.0)]).with_input("1")]);
        assert!(matches!(
            run_suite(&p, &suite, &RunConfig::default()),
            Err(RunnerError::SuiteShapeMismatch { .. })
        ));
        assert_eq!(
            run_suite(&p, &TestSuite::new(vec![]), &RunConfig::default()),
            Err(RunnerError::EmptySuite)
        );
    }

    #[test]
    fn inputs_select_the_initial_state() {
        let p = parse(BELL).unwrap();
        let suite = TestSuite::new(vec![
            TestCase::new("q1 set", &[("01", 0.5), ("10", 0.5)]).with_input("10"),
        ]);
        let v = run_suite(&p, &suite, &RunConfig::default()).unwrap();
        assert_eq!(v[0].outcome, Outcome::Pass);
    }

    #[test]
    fn crashes_and_timeouts_become_verdicts() {
        let p = parse("qreg q[1]; creg c[1]; rx(1/0) q[0]; measure q[0] -> c[0];").unwrap();
        let suite = TestSuite::new(vec![TestCase::new("t", &[("0", 1.0)])]);
        let v = run_suite(&p, &suite, &RunConfig::default()).unwrap();
        assert_eq!(v[0].outcome, Outcome::CrashError);
        assert!(v[0].covered.is_empty());

        let p = parse(BELL).unwrap();
        let cfg = RunConfig {
            budget: Duration::ZERO,
            ..RunConfig::default()
        };
        let ms = generate_mutants(&p, &OperatorSet::default());
        let m = run_matrix(&p, &ms, &TestSuite::new(vec![TestCase::new("t", &[("00", 1.0)])]), &cfg)
            .unwrap();
        assert!(m
            .rows
            .iter()
            .all(|r| r.verdicts.iter().all(|v| v.outcome == Outcome::Timeout)));
        assert!(m.rows.iter().all(|r| !r.behavior_changing));
    }

    #[test]
    fn zero_mutants_leaves_original_row() {
        let p = parse(BELL).unwrap();
        let suite = TestSuite::new(vec![TestCase::new("bell", &[("00", 0.5), ("11", 0.5)])]);
        let m = run_matrix(&p, &[], &suite, &RunConfig::default()).unwrap();
        assert_eq!(m.rows.len(), 1);
        assert_eq!(m.to_csv(), "version,bell\noriginal,P\n");
    }

    #[test]
    fn behavior_changing_matches_rerun() {
        let p = parse(BELL).unwrap();
        let suite = TestSuite::new(vec![
            TestCase::new("bell", &[("00", 0.5), ("11", 0.5)]),
            TestCase::new("bell-10", &[("01", 0.5), ("10", 0.5)]).with_input("10"),
        ]);
        let ms = generate_mutants(&p, &OperatorSet::default());
        let matrix = run_matrix(&p, &ms, &suite, &RunConfig::default()).unwrap();
        for (m, row) in ms.iter().zip(matrix.mutant_rows()) {
            let rerun = run_suite(&m.program, &suite, &RunConfig::default()).unwrap();
            let breaks = rerun.iter().any(|v| !v.passed());
            assert_eq!(row.behavior_changing, breaks, "{}", m.id);
        }
        assert!(matrix.mutant_rows().iter().any(|r| r.behavior_changing));
    }
}
