use std::collections::HashMap;

use super::LocalizeError;
use crate::frontend::Program;
use crate::mutate::Mutant;
use crate::runner::ExecutionMatrix;

/// MUSE suspiciousness:
///
/// `S(s) = 1/|mut(s)| * Σ_{m ∈ mut(s)} |f(s) ∩ pass(m)| / |f(s)|`
///
/// where `f(s)` are the original's failing tests that cover `s` and
/// `pass(m)` the tests mutant `m` passes. Mutants with a timed-out cell are
/// removed from `mut(s)`. Statements with an empty `f(s)` or `mut(s)` score
/// 0. The sum is kept in integers and divided once.
pub fn muse_scores(
    matrix: &ExecutionMatrix,
    mutants: &[Mutant],
    p: &Program,
) -> Result<Vec<f64>, LocalizeError> {
    let original = &matrix.original().verdicts;
    if !original.iter().any(|v| v.outcome.is_failure()) {
        return Err(LocalizeError::NoFailingTests);
    }
    let rows: HashMap<&str, usize> = matrix
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.version.as_str(), i))
        .collect();

    let n = p.len();
    // per statement: (Σ |f(s) ∩ pass(m)|, |mut(s)|)
    let mut acc = vec![(0u64, 0u64); n];
    let failing_covering: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            original
                .iter()
                .enumerate()
                .filter(|(_, v)| v.outcome.is_failure() && v.covered.contains(&s))
                .map(|(t, _)| t)
                .collect()
        })
        .collect();

    for m in mutants {
        let Some(s) = m.target else { continue };
        let row = rows
            .get(m.id.as_str())
            .map(|&i| &matrix.rows[i])
            .ok_or_else(|| LocalizeError::MissingRow(m.id.clone()))?;
        if s >= n || row.timed_out() {
            continue;
        }
        let flipped = failing_covering[s]
            .iter()
            .filter(|&&t| row.verdicts[t].passed())
            .count() as u64;
        acc[s].0 += flipped;
        acc[s].1 += 1;
    }

    Ok(acc
        .iter()
        .zip(&failing_covering)
        .map(|(&(flipped, mutants), f)| {
            let denom = mutants * f.len() as u64;
            if denom == 0 {
                0.0
            } else {
                flipped as f64 / denom as f64
            }
        })
        .collect())
}
