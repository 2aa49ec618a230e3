//! Fault-injection benchmarks, batch evaluation and statistics.

mod evaluate;
mod inject;
mod item;
pub mod stats;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::frontend::FrontendError;
use crate::localize::LocalizeError;
use crate::runner::RunnerError;

pub use evaluate::{
    ecdf_tables, evaluate, read_records, records_csv, stats_report, timings_csv, Accounting, CategoryCount,
    Comparison, EvalRecord, Evaluation, MedianRow, OperatorCount, StatsReport, GROUPS,
};
pub use inject::inject_faults;
pub use item::{
    load_benchmark, BenchmarkItem, ItemFailure, Meta, Origin, BUGGY_FILE, META_FILE, REFERENCE_FILE, TESTS_FILE,
};
pub use stats::StatsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("reference program fails its own suite: {}", tests.join(", "))]
    ReferenceFailsSuite { tests: Vec<String> },
    #[error("item `{id}`: {reason}")]
    InvalidItem { id: String, reason: String },
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: FrontendError },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("no benchmark items under {}", .0.display())]
    NoItems(PathBuf),
    #[error("records: {0}")]
    Records(String),
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Runner(#[from] RunnerError),
    #[error(transparent)]
    Localize(#[from] LocalizeError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl BenchError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        BenchError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}
