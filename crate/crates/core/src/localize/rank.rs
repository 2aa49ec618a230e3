use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{LocalizeError, Method, Scores};
use crate::frontend::{serialize_statement, Program};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedStatement {
    pub id: usize,
    pub line: usize,
    pub text: String,
    pub score: f64,
    pub best_rank: usize,
    pub worst_rank: usize,
}

/// EXAM percentages for the best- and worst-case tie resolution, each using
/// the highest-ranked faulty statement for that scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exam {
    pub faulty: BTreeSet<usize>,
    pub best: f64,
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspiciousnessReport {
    pub method: Method,
    pub degenerate: bool,
    /// Indexed by statement id.
    pub statements: Vec<RankedStatement>,
    /// Statement ids by descending score, ascending id within ties.
    pub ranked: Vec<usize>,
    pub exam: Option<Exam>,
}

impl SuspiciousnessReport {
    /// Rank `scores` (one per statement of `p`; missing entries score 0).
    pub fn new(method: Method, scores: &Scores, p: &Program) -> Self {
        let n = p.len();
        let score = |i: usize| scores.values.get(i).copied().unwrap_or(0.0);
        let mut ranked: Vec<usize> = (0..n).collect();
        ranked.sort_by(|&a, &b| score(b).total_cmp(&score(a)).then(a.cmp(&b)));

        let mut statements: Vec<RankedStatement> = p
            .statements
            .iter()
            .map(|s| RankedStatement {
                id: s.id,
                line: s.line,
                text: serialize_statement(s),
                score: score(s.id),
                best_rank: 0,
                worst_rank: 0,
            })
            .collect();
        let mut start = 0;
        while start < n {
            let group_score = score(ranked[start]);
            let mut end = start;
            while end < n && score(ranked[end]) == group_score {
                end += 1;
            }
            for &id in &ranked[start..end] {
                statements[id].best_rank = start + 1;
                statements[id].worst_rank = end;
            }
            start = end;
        }
        SuspiciousnessReport {
            method,
            degenerate: scores.degenerate,
            statements,
            ranked,
            exam: None,
        }
    }

    /// Attach EXAM scores for the given ground truth.
    pub fn with_exam(mut self, faulty: &BTreeSet<usize>) -> Result<Self, LocalizeError> {
        if faulty.is_empty() {
            return Err(LocalizeError::EmptyFaultSet);
        }
        let n = self.statements.len();
        if let Some(&bad) = faulty.iter().find(|&&f| f >= n) {
            return Err(LocalizeError::UnknownStatement(bad));
        }
        let best = faulty.iter().map(|&f| self.statements[f].best_rank).min().unwrap();
        let worst = faulty.iter().map(|&f| self.statements[f].worst_rank).min().unwrap();
        self.exam = Some(Exam {
            faulty: faulty.clone(),
            best: 100.0 * best as f64 / n as f64,
            worst: 100.0 * worst as f64 / n as f64,
        });
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Plain-text ranking table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} suspiciousness", self.method);
        let _ = writeln!(out, "{:>4} {:>5} {:>10} {:>5} {:>5}  statement", "id", "line", "score", "best", "worst");
        for &id in &self.ranked {
            let s = &self.statements[id];
            let mark = match &self.exam {
                Some(e) if e.faulty.contains(&id) => " *",
                _ => "",
            };
            let _ = writeln!(
                out,
                "{:>4} {:>5} {:>10.6} {:>5} {:>5}  {}{}",
                s.id, s.line, s.score, s.best_rank, s.worst_rank, s.text, mark
            );
        }
        if let Some(e) = &self.exam {
            let _ = writeln!(out, "EXAM best {:.2}%  worst {:.2}%", e.best, e.worst);
        }
        if self.degenerate {
            let _ = writeln!(out, "warning: degenerate spectrum; SBFL cannot separate statements");
        }
        out
    }
}

/// Rank statements and evaluate EXAM against `faulty`.
pub fn rank_and_exam(
    method: Method,
    scores: &Scores,
    p: &Program,
    faulty: &BTreeSet<usize>,
) -> Result<SuspiciousnessReport, LocalizeError> {
    SuspiciousnessReport::new(method, scores, p).with_exam(faulty)
}
