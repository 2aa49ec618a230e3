use serde::{Deserialize, Serialize};

use super::{muse_scores, ochiai_scores, spectrum, tarantula_scores, LocalizeError, Method, Scores};
use super::SuspiciousnessReport;
use crate::frontend::Program;
use crate::mutate::{generate_mutants, Mutant, MutationOperator, OperatorSet};
use crate::runner::{matrix_in_current_pool, ExecutionMatrix, RunConfig, TestSuite};

/// One mutant's row, condensed for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantSummary {
    pub id: String,
    pub operator: MutationOperator,
    pub experimental: bool,
    pub target: Option<usize>,
    pub payload: String,
    /// One `P`/`F`/`T`/`E` letter per test.
    pub outcomes: String,
    pub behavior_changing: bool,
}

/// Mutants, execution matrix and one report per requested method.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub mutants: Vec<Mutant>,
    pub matrix: ExecutionMatrix,
    pub reports: Vec<SuspiciousnessReport>,
}

impl Analysis {
    pub fn report(&self, method: Method) -> Option<&SuspiciousnessReport> {
        self.reports.iter().find(|r| r.method == method)
    }

    pub fn mutant_summaries(&self) -> Vec<MutantSummary> {
        self.mutants
            .iter()
            .zip(self.matrix.mutant_rows())
            .map(|(m, row)| MutantSummary {
                id: m.id.clone(),
                operator: m.operator,
                experimental: m.operator.is_experimental(),
                target: m.target,
                payload: m.payload.clone(),
                outcomes: row.verdicts.iter().map(|v| v.outcome.letter()).collect(),
                behavior_changing: row.behavior_changing,
            })
            .collect()
    }
}

/// Score `p` by every method in `methods` against `suite`.
pub fn analyze(
    p: &Program,
    suite: &TestSuite,
    ops: &OperatorSet,
    methods: &[Method],
    cfg: &RunConfig,
) -> Result<Analysis, LocalizeError> {
    suite.check(p)?;
    let mutants = generate_mutants(p, ops);
    let matrix = cfg.install(|| matrix_in_current_pool(p, &mutants, suite, cfg))?;
    analyze_matrix(p, mutants, matrix, methods)
}

/// Like [`analyze`] on an already executed matrix. Runs no tests.
pub(crate) fn analyze_matrix(
    p: &Program,
    mutants: Vec<Mutant>,
    matrix: ExecutionMatrix,
    methods: &[Method],
) -> Result<Analysis, LocalizeError> {
    if !matrix.original().verdicts.iter().any(|v| v.outcome.is_failure()) {
        return Err(LocalizeError::NoFailingTests);
    }
    let spec = spectrum(&matrix, p.len());
    let mut reports = Vec::with_capacity(methods.len());
    for &method in methods {
        let scores = match method {
            Method::Muse => Scores {
                values: muse_scores(&matrix, &mutants, p)?,
                degenerate: false,
            },
            Method::Ochiai => ochiai_scores(&spec),
            Method::Tarantula => tarantula_scores(&spec),
        };
        reports.push(SuspiciousnessReport::new(method, &scores, p));
    }
    Ok(Analysis {
        mutants,
        matrix,
        reports,
    })
}
