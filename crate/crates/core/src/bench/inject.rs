use std::collections::BTreeSet;

use super::{BenchError, BenchmarkItem, Origin};
use crate::frontend::Program;
use crate::mutate::{generate_mutants, MutationOperator, OperatorSet};
use crate::runner::{matrix_in_current_pool, run_suite, Outcome, RunConfig, TestSuite};

/// Turn every mutant of `reference` that fails at least one test into a
/// benchmark item named `<prefix>-<mutant id>`.
///
/// Mutants with a timed-out test, or that only crash, are skipped, as are
/// equivalent mutants (they fail nothing). The initialization operator has
/// no single faulty statement and is ignored. Ground truth is the mutated
/// statement; a deletion blames the statement before the gap (statement 0
/// when the first statement was deleted).
pub fn inject_faults(
    reference: &Program,
    suite: &TestSuite,
    ops: &OperatorSet,
    cfg: &RunConfig,
    prefix: &str,
) -> Result<Vec<BenchmarkItem>, BenchError> {
    let verdicts = run_suite(reference, suite, cfg)?;
    let failing: Vec<String> = suite
        .tests
        .iter()
        .zip(&verdicts)
        .filter(|(_, v)| !v.passed())
        .map(|(t, _)| t.name.clone())
        .collect();
    if !failing.is_empty() {
        return Err(BenchError::ReferenceFailsSuite { tests: failing });
    }

    let Ok(ops) = ops.without(MutationOperator::Qih) else {
        return Ok(Vec::new());
    };
    let mutants = generate_mutants(reference, &ops);
    let matrix = cfg.install(|| matrix_in_current_pool(reference, &mutants, suite, cfg))?;

    let mut items = Vec::new();
    for (m, row) in mutants.into_iter().zip(matrix.mutant_rows()) {
        let fails = row.verdicts.iter().any(|v| v.outcome == Outcome::Fail);
        if !fails || row.timed_out() {
            continue;
        }
        let Some(target) = m.target else { continue };
        if m.program.is_empty() {
            continue;
        }
        let ground_truth = match m.operator {
            MutationOperator::Qgd | MutationOperator::Qmd => target.saturating_sub(1),
            _ => target,
        };
        items.push(BenchmarkItem {
            id: format!("{prefix}-{}", m.id.to_lowercase()),
            buggy: m.program,
            reference: reference.clone(),
            suite: suite.clone(),
            ground_truth: BTreeSet::from([ground_truth]),
            origin: Origin::Injected { operator: m.operator },
            description: Some(m.payload),
        });
    }
    Ok(items)
}
