use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use qfl_core::mutate::OperatorSet;
use qfl_core::runner::{RunConfig, DEFAULT_TOLERANCE};
use qfl_core::simulator;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Optional TOML file; every key may be omitted.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub ops: Option<String>,
    pub budget_ms: Option<u64>,
    pub workers: Option<usize>,
    pub max_branches: Option<usize>,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("{}", path.display()))
    }
}

/// Settings after merging flags, environment and config file.
#[derive(Debug, Clone)]
pub struct Config {
    pub ops: OperatorSet,
    pub budget: Duration,
    pub workers: usize,
    pub max_branches: usize,
    pub tolerance: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Values given on the command line (or through `QFL_WORKERS`).
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub ops: Option<String>,
    pub budget_ms: Option<u64>,
    pub workers: Option<usize>,
    pub max_branches: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Config {
    pub fn resolve(file: FileConfig, cli: Overrides) -> Result<Self> {
        let ops_text = cli.ops.or(file.ops);
        let ops = match ops_text {
            Some(text) => text.parse::<OperatorSet>().context("--ops")?,
            None => OperatorSet::default(),
        };
        let budget_ms = cli
            .budget_ms
            .or(file.budget_ms)
            .unwrap_or(simulator::DEFAULT_BUDGET.as_millis() as u64);
        let workers = cli.workers.or(file.workers).unwrap_or(1);
        let max_branches = cli
            .max_branches
            .or(file.max_branches)
            .unwrap_or(simulator::DEFAULT_MAX_BRANCHES);
        let tolerance = file.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if budget_ms == 0 || workers == 0 || max_branches == 0 {
            bail!("budget, workers and max_branches must be positive");
        }
        if !(tolerance > 0.0 && tolerance <= 1.0) {
            bail!("tolerance must be in (0, 1], got {tolerance}");
        }
        Ok(Config {
            ops,
            budget: Duration::from_millis(budget_ms),
            workers,
            max_branches,
            tolerance,
            out: cli.out.or(file.out),
            format: cli.format.or(file.format).unwrap_or(Format::Table),
        })
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            budget: self.budget,
            max_branches: self.max_branches,
            workers: self.workers,
            ..RunConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beats_defaults() {
        let file: FileConfig = toml::from_str("ops = \"QGR\"\nworkers = 3\nbudget_ms = 50\n").unwrap();
        let cli = Overrides {
            workers: Some(5),
            ..Overrides::default()
        };
        let c = Config::resolve(file, cli).unwrap();
        assert_eq!(c.workers, 5);
        assert_eq!(c.ops.to_string(), "QGR");
        assert_eq!(c.budget, Duration::from_millis(50));
        assert_eq!(c.format, Format::Table);
    }

    #[test]
    fn rejects_bad_values() {
        let zero = Overrides {
            workers: Some(0),
            ..Overrides::default()
        };
        assert!(Config::resolve(FileConfig::default(), zero).is_err());
        let bad_ops = Overrides {
            ops: Some("QGR,NOPE".into()),
            ..Overrides::default()
        };
        assert!(Config::resolve(FileConfig::default(), bad_ops).is_err());
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
        let file: FileConfig = toml::from_str("tolerance = 0.0").unwrap();
        assert!(Config::resolve(file, Overrides::default()).is_err());
    }
}
