//! Suspiciousness scoring and EXAM evaluation.
//!
//! Every score is computed as one correctly rounded division (plus a square
//! root for Ochiai) of exact integer counts, so statements whose scores are
//! mathematically equal compare equal and tie groups are exact.

mod analysis;
mod muse;
mod rank;
mod sbfl;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::runner::RunnerError;

pub use analysis::{analyze, Analysis, MutantSummary};
pub(crate) use analysis::analyze_matrix;
pub use muse::muse_scores;
pub use rank::{rank_and_exam, Exam, RankedStatement, SuspiciousnessReport};
pub use sbfl::{ochiai_scores, spectrum, tarantula_scores, Spectrum, SpectrumCounts};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocalizeError {
    #[error("no failing tests: the original program passes its whole suite")]
    NoFailingTests,
    #[error("fault set is empty")]
    EmptyFaultSet,
    #[error("faulty statement {0} is not in the program")]
    UnknownStatement(usize),
    #[error("matrix has no row for mutant `{0}`")]
    MissingRow(String),
    #[error(transparent)]
    Runner(#[from] RunnerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Muse,
    Ochiai,
    Tarantula,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Muse, Method::Ochiai, Method::Tarantula];

    pub fn name(self) -> &'static str {
        match self {
            Method::Muse => "muse",
            Method::Ochiai => "ochiai",
            Method::Tarantula => "tarantula",
        }
    }

    pub fn is_sbfl(self) -> bool {
        self != Method::Muse
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown method `{}` (expected muse, ochiai or tarantula)", s.trim()))
    }
}

/// Per-statement scores plus the degeneracy flag SBFL sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Scores {
    pub values: Vec<f64>,
    pub degenerate: bool,
}
