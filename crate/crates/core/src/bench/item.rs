use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::frontend::{parse, serialize, Program};
use crate::mutate::MutationOperator;
use crate::runner::{run_suite, Outcome, RunConfig, TestSuite};

pub const BUGGY_FILE: &str = "buggy.qasm";
pub const REFERENCE_FILE: &str = "reference.qasm";
pub const TESTS_FILE: &str = "tests.json";
pub const META_FILE: &str = "meta.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Origin {
    Injected { operator: MutationOperator },
    Curated,
}

impl Origin {
    /// `injected` or `curated`.
    pub fn scenario(self) -> &'static str {
        match self {
            Origin::Injected { .. } => "injected",
            Origin::Curated => "curated",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Injected { operator } => write!(f, "injected:{}", operator.code()),
            Origin::Curated => f.write_str("curated"),
        }
    }
}

impl FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "curated" => Ok(Origin::Curated),
            Some(("injected", code)) => code
                .parse()
                .map(|operator| Origin::Injected { operator })
                .map_err(|e| format!("{e}")),
            _ => Err(format!("unknown origin `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub id: String,
    pub origin: Origin,
    pub ground_truth: BTreeSet<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkItem {
    pub id: String,
    pub buggy: Program,
    pub reference: Program,
    pub suite: TestSuite,
    pub ground_truth: BTreeSet<usize>,
    pub origin: Origin,
    pub description: Option<String>,
}

impl BenchmarkItem {
    /// Check that the buggy program fails some test, the reference passes
    /// all of them, and the ground truth names real statements.
    pub fn validate(&self, cfg: &RunConfig) -> Result<(), BenchError> {
        let invalid = |reason: String| BenchError::InvalidItem {
            id: self.id.clone(),
            reason,
        };
        if self.ground_truth.is_empty() {
            return Err(invalid("ground truth is empty".into()));
        }
        if let Some(s) = self.ground_truth.iter().find(|&&s| s >= self.buggy.len()) {
            return Err(invalid(format!(
                "ground truth statement {s} is out of range ({} statements)",
                self.buggy.len()
            )));
        }
        let reference = run_suite(&self.reference, &self.suite, cfg)?;
        let failing: Vec<String> = self
            .suite
            .tests
            .iter()
            .zip(&reference)
            .filter(|(_, v)| !v.passed())
            .map(|(t, _)| t.name.clone())
            .collect();
        if !failing.is_empty() {
            return Err(BenchError::ReferenceFailsSuite { tests: failing });
        }
        let buggy = run_suite(&self.buggy, &self.suite, cfg)?;
        if !buggy.iter().any(|v| v.outcome == Outcome::Fail) {
            return Err(invalid("buggy program fails no test".into()));
        }
        Ok(())
    }

    pub fn meta(&self) -> Meta {
        Meta {
            id: self.id.clone(),
            origin: self.origin,
            ground_truth: self.ground_truth.clone(),
            description: self.description.clone(),
        }
    }

    /// Write the item under `root/<id>/`.
    pub fn save(&self, root: &Path) -> Result<PathBuf, BenchError> {
        let dir = root.join(&self.id);
        fs::create_dir_all(&dir).map_err(|e| BenchError::io(&dir, e))?;
        let meta = serde_json::to_string_pretty(&self.meta()).expect("meta serializes") + "\n";
        for (name, text) in [
            (BUGGY_FILE, serialize(&self.buggy)),
            (REFERENCE_FILE, serialize(&self.reference)),
            (TESTS_FILE, self.suite.to_json()),
            (META_FILE, meta),
        ] {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| BenchError::io(&path, e))?;
        }
        Ok(dir)
    }

    /// Read an item directory. Does not run [`validate`](Self::validate).
    pub fn load(dir: &Path) -> Result<Self, BenchError> {
        let read = |name: &str| {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|e| BenchError::io(&path, e))
        };
        let program = |name: &str| {
            let text = read(name)?;
            parse(&text).map_err(|source| BenchError::Parse {
                path: dir.join(name),
                source,
            })
        };
        let buggy = program(BUGGY_FILE)?;
        let reference = program(REFERENCE_FILE)?;
        let suite = TestSuite::from_json(&read(TESTS_FILE)?).map_err(|e| BenchError::Format {
            path: dir.join(TESTS_FILE),
            message: e.to_string(),
        })?;
        let meta: Meta = serde_json::from_str(&read(META_FILE)?).map_err(|e| BenchError::Format {
            path: dir.join(META_FILE),
            message: e.to_string(),
        })?;
        Ok(BenchmarkItem {
            id: meta.id,
            buggy,
            reference,
            suite,
            ground_truth: meta.ground_truth,
            origin: meta.origin,
            description: meta.description,
        })
    }
}

/// Item directories that could not be used, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemFailure {
    pub item: String,
    pub message: String,
}

/// Load and validate every item directory under `root`, sorted by id.
/// Invalid items are reported, not fatal; an empty benchmark is.
pub fn load_benchmark(root: &Path, cfg: &RunConfig) -> Result<(Vec<BenchmarkItem>, Vec<ItemFailure>), BenchError> {
    let entries = fs::read_dir(root).map_err(|e| BenchError::io(root, e))?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(BenchError::NoItems(root.to_path_buf()));
    }
    let mut items = Vec::new();
    let mut failures = Vec::new();
    for dir in dirs {
        let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        match BenchmarkItem::load(&dir).and_then(|item| item.validate(cfg).map(|()| item)) {
            Ok(item) => items.push(item),
            Err(e) => failures.push(ItemFailure {
                item: name,
                message: e.to_string(),
            }),
        }
    }
    items.sort_by(|a, b| a.id.cmp(&b.id));
    Ok((items, failures))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::TestCase;

    fn item() -> BenchmarkItem {
        BenchmarkItem {
            id: "flip".into(),
            buggy: parse("qreg q[1]; creg c[1]; measure q[0] -> c[0];").unwrap(),
            reference: parse("qreg q[1]; creg c[1]; x q[0]; measure q[0] -> c[0];").unwrap(),
            suite: TestSuite::new(vec![TestCase::new("one", &[("1", 1.0)])]),
            ground_truth: BTreeSet::from([0]),
            origin: Origin::Injected {
                operator: MutationOperator::Qgd,
            },
            description: None,
        }
    }

    #[test]
    fn origin_text_round_trip() {
        for o in [
            Origin::Curated,
            Origin::Injected {
                operator: MutationOperator::Crp,
            },
        ] {
            assert_eq!(o.to_string().parse::<Origin>().unwrap(), o);
        }
        assert!("injected:XYZ".parse::<Origin>().is_err());
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let it = item();
        it.validate(&RunConfig::default()).unwrap();
        it.save(dir.path()).unwrap();
        let back = BenchmarkItem::load(&dir.path().join("flip")).unwrap();
        assert_eq!(back, it);
    }

    #[test]
    fn validation_rejects_broken_items() {
        let cfg = RunConfig::default();
        let mut it = item();
        it.ground_truth.clear();
        assert!(matches!(it.validate(&cfg), Err(BenchError::InvalidItem { .. })));
        let mut it = item();
        it.buggy = it.reference.clone();
        assert!(matches!(it.validate(&cfg), Err(BenchError::InvalidItem { .. })));
        let mut it = item();
        it.reference = it.buggy.clone();
        assert!(matches!(it.validate(&cfg), Err(BenchError::ReferenceFailsSuite { .. })));
    }

    #[test]
    fn loading_reports_bad_directories() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_benchmark(dir.path(), &RunConfig::default()),
            Err(BenchError::NoItems(_))
        ));
        item().save(dir.path()).unwrap();
        fs::create_dir(dir.path().join("broken")).unwrap();
        let (items, failures) = load_benchmark(dir.path(), &RunConfig::default()).unwrap();
        assert_eq!(items.len(), 1);
        assert_eq!(failures.len(), 1);
        assert_eq!(failures[0].item, "broken");
    }
}
