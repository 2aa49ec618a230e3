use std::collections::BTreeSet;

use super::{serialize_statement, FrontendError, Program};

/// Statement ids of `buggy` that differ from `reference`.
///
/// Statements are compared by canonical text and aligned with a longest
/// common subsequence, using as few hunks as possible among those. Each maximal run of unmatched statements is a hunk:
/// buggy statements removed or rewritten in the hunk are blamed directly; a
/// hunk that only inserts reference statements blames the buggy statement
/// just before the insertion point, or statement 0 at the very start.
pub fn diff_ground_truth(
    buggy: &Program,
    reference: &Program,
) -> Result<BTreeSet<usize>, FrontendError> {
    let a: Vec<String> = buggy.statements.iter().map(serialize_statement).collect();
    let b: Vec<String> = reference.statements.iter().map(serialize_statement).collect();
    if a == b {
        return Err(FrontendError::EmptyDiff);
    }
    if a.is_empty() {
        return Err(FrontendError::NoStatements);
    }

    let (n, m) = (a.len(), b.len());
    // cost[i][j][g] = (edits, hunks) to align a[i..] with b[j..]; g = 1 when
    // the previous step was already an edit, so continuing the hunk is free
    let inf = (usize::MAX / 2, usize::MAX / 2);
    let mut cost = vec![vec![[inf; 2]; m + 1]; n + 1];
    cost[n][m] = [(0, 0); 2];
    let step = |c: (usize, usize), g: usize| (c.0 + 1, c.1 + 1 - g);
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            if i == n && j == m {
                continue;
            }
            for g in 0..2 {
                let mut best = inf;
                if i < n && j < m && a[i] == b[j] {
                    best = best.min(cost[i + 1][j + 1][0]);
                }
                if i < n {
                    best = best.min(step(cost[i + 1][j][1], g));
                }
                if j < m {
                    best = best.min(step(cost[i][j + 1][1], g));
                }
                cost[i][j][g] = best;
            }
        }
    }

    // walk one optimal alignment: match, then delete, then insert
    let mut blamed = BTreeSet::new();
    let (mut i, mut j, mut g) = (0, 0, 0);
    let mut hunk: Option<(usize, bool)> = None;
    let close = |hunk: &mut Option<(usize, bool)>, i: usize, blamed: &mut BTreeSet<usize>| {
        if let Some((start, inserted)) = hunk.take() {
            if i > start {
                blamed.extend(start..i);
            } else if inserted {
                blamed.insert(start.saturating_sub(1));
            }
        }
    };
    while i < n || j < m {
        let here = cost[i][j][g];
        if i < n && j < m && a[i] == b[j] && cost[i + 1][j + 1][0] == here {
            close(&mut hunk, i, &mut blamed);
            i += 1;
            j += 1;
            g = 0;
            continue;
        }
        let h = hunk.get_or_insert((i, false));
        if i < n && step(cost[i + 1][j][1], g) == here {
            i += 1;
        } else {
            h.1 = true;
            j += 1;
        }
        g = 1;
    }
    close(&mut hunk, i, &mut blamed);
    Ok(blamed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    fn ids(buggy: &str, reference: &str) -> Result<Vec<usize>, FrontendError> {
        diff_ground_truth(&parse(buggy).unwrap(), &parse(reference).unwrap())
            .map(|s| s.into_iter().collect())
    }

    const DECL: &str = "qreg q[4]; creg c[4];\n";

    #[test]
    fn identical_programs_have_no_diff() {
        let src = format!("{DECL}h q[0];\ncx q[0],q[1];");
        assert_eq!(ids(&src, &src), Err(FrontendError::EmptyDiff));
    }

    #[test]
    fn formatting_differences_are_not_faults() {
        let a = format!("{DECL}h q[0];\ncx q[0],q[1];");
        let b = format!("{DECL}// comment\nh   q[0];\n\ncx q[0], q[1];");
        assert_eq!(ids(&a, &b), Err(FrontendError::EmptyDiff));
    }

    #[test]
    fn substitution_blames_the_statement() {
        let buggy = format!("{DECL}h q[0];\ncx q[0],q[1];\nmeasure q[1] -> c[1];");
        let fixed = format!("{DECL}h q[0];\ncz q[0],q[1];\nmeasure q[1] -> c[1];");
        assert_eq!(ids(&buggy, &fixed), Ok(vec![1]));
    }

    #[test]
    fn missing_initialization_maps_to_statement_zero() {
        let buggy = format!("{DECL}cx q[3],q[1];\ncx q[1],q[0];\nmeasure q[0] -> c[0];");
        let fixed = format!(
            "{DECL}h q[0];\nh q[1];\nh q[2];\nh q[3];\ncx q[3],q[1];\ncx q[1],q[0];\nmeasure q[0] -> c[0];"
        );
        assert_eq!(ids(&buggy, &fixed), Ok(vec![0]));
    }

    #[test]
    fn insertion_maps_to_preceding_statement() {
        let buggy = format!("{DECL}h q[0];\nx q[1];\ncx q[0],q[1];\nmeasure q[0] -> c[0];");
        let fixed =
            format!("{DECL}h q[0];\nx q[1];\ncx q[0],q[1];\nh q[0];\nmeasure q[0] -> c[0];");
        assert_eq!(ids(&buggy, &fixed), Ok(vec![2]));
    }

    #[test]
    fn extra_statement_is_blamed() {
        let buggy = format!("{DECL}h q[0];\nh q[0];\ncx q[0],q[1];");
        let fixed = format!("{DECL}h q[0];\ncx q[0],q[1];");
        assert_eq!(ids(&buggy, &fixed), Ok(vec![1]));
    }

    #[test]
    fn multiple_hunks() {
        let buggy = format!("{DECL}h q[0];\nx q[1];\ncx q[0],q[1];\nz q[2];\nmeasure q[0] -> c[0];");
        let fixed = format!("{DECL}h q[0];\ny q[1];\ncx q[0],q[1];\nmeasure q[0] -> c[0];");
        assert_eq!(ids(&buggy, &fixed), Ok(vec![1, 3]));
    }
}
