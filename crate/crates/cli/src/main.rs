//! `qfl`: fault localization for quantum circuit programs.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Config, FileConfig, Format, Overrides};

#[derive(Debug, Parser)]
#[command(name = "qfl", version, about = "Mutation-based fault localization for quantum circuits")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML file with defaults for the options below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for test execution.
    #[arg(long, global = true, env = "QFL_WORKERS")]
    workers: Option<usize>,
    /// Per-test time budget in milliseconds.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Branch limit for mid-circuit measurement.
    #[arg(long, global = true)]
    max_branches: Option<usize>,
    /// Comma-separated mutation operator codes.
    #[arg(long, global = true)]
    ops: Option<String>,
    /// Output format for standard output.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a program.
    Check { program: PathBuf },
    /// List the mutants of a program.
    Mutate { program: PathBuf },
    /// Run a test suite against a program.
    Test { program: PathBuf, suite: PathBuf },
    /// Rank statements by suspiciousness.
    Localize {
        program: PathBuf,
        suite: PathBuf,
        /// Also produce Ochiai and Tarantula reports.
        #[arg(long)]
        sbfl: bool,
        /// Fixed version of the program; its diff gives the faulty statements.
        #[arg(long, conflicts_with = "faulty")]
        reference: Option<PathBuf>,
        /// Faulty statement ids, comma-separated.
        #[arg(long, value_delimiter = ',')]
        faulty: Vec<usize>,
        /// Directory for report files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build benchmark items by mutating a correct program.
    Inject {
        reference: PathBuf,
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Item id prefix; defaults to the reference file stem.
        #[arg(long)]
        prefix: Option<String>,
    },
    /// Localize every item of a benchmark directory.
    Evaluate {
        dir: PathBuf,
        #[arg(long, default_value = "muse,ochiai,tarantula")]
        methods: String,
        /// Directory for records, ECDF tables and stats.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute statistics from a records file.
    Compare {
        records: PathBuf,
        /// Methods to include; defaults to those present in the file.
        #[arg(long)]
        methods: Option<String>,
        /// Write stats JSON here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let g = cli.global;
    let file = match &g.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let out = match &cli.command {
        Command::Localize { out, .. } | Command::Evaluate { out, .. } => out.clone(),
        _ => None,
    };
    let cfg = Config::resolve(
        file,
        Overrides {
            ops: g.ops,
            budget_ms: g.budget,
            workers: g.workers,
            max_branches: g.max_branches,
            out,
            format: g.format,
        },
    )?;
    match cli.command {
        Command::Check { program } => commands::check(&program, &cfg),
        Command::Mutate { program } => commands::mutate(&program, &cfg),
        Command::Test { program, suite } => commands::test(&program, &suite, &cfg),
        Command::Localize {
            program,
            suite,
            sbfl,
            reference,
            faulty,
            ..
        } => commands::localize(&program, &suite, sbfl, reference.as_deref(), &faulty, &cfg),
        Command::Inject {
            reference,
            suite,
            out,
            prefix,
        } => commands::inject(&reference, &suite, &out, prefix, &cfg),
        Command::Evaluate { dir, methods, .. } => commands::evaluate(&dir, &methods, &cfg),
        Command::Compare { records, methods, out } => commands::compare(&records, methods.as_deref(), out.as_deref()),
    }
}
