use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use qfl_core::bench::{self, BenchError};
use qfl_core::frontend::{self, diff_ground_truth, serialize, Program};
use qfl_core::localize::{analyze, LocalizeError, Method, SuspiciousnessReport};
use qfl_core::mutate::{generate_mutants, Category};
use qfl_core::runner::{run_suite, TestSuite};
use serde::Serialize;

use crate::config::{Config, Format};

const NO_FAILING_TESTS: u8 = 2;

fn load_program(path: &Path) -> Result<Program> {
    frontend::parse_file(path)
        .with_context(|| format!("cannot read {}", path.display()))?
        .map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// Tests without an explicit tolerance get the configured default.
fn load_suite(path: &Path, cfg: &Config) -> Result<TestSuite> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{}: invalid JSON", path.display()))?;
    if let Some(tests) = value.get_mut("tests").and_then(|t| t.as_array_mut()) {
        for t in tests.iter_mut().filter_map(|t| t.as_object_mut()) {
            t.entry("tolerance").or_insert(cfg.tolerance.into());
        }
    }
    TestSuite::from_json(&value.to_string()).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn csv_text(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn check(path: &Path, cfg: &Config) -> Result<ExitCode> {
    let p = load_program(path)?;
    #[derive(Serialize)]
    struct Summary {
        qubits: usize,
        clbits: usize,
        statements: usize,
    }
    let s = Summary {
        qubits: p.qubit_count(),
        clbits: p.clbit_count(),
        statements: p.len(),
    };
    match cfg.format {
        Format::Json => print!("{}", json(&s)),
        Format::Csv => print!(
            "{}",
            csv_text([
                vec!["qubits".into(), "clbits".into(), "statements".into()],
                vec![s.qubits.to_string(), s.clbits.to_string(), s.statements.to_string()],
            ])
        ),
        Format::Table => {
            println!("{}: ok", path.display());
            println!("{} qubit(s), {} clbit(s), {} statement(s)", s.qubits, s.clbits, s.statements);
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn mutate(path: &Path, cfg: &Config) -> Result<ExitCode> {
    let p = load_program(path)?;
    let mutants = generate_mutants(&p, &cfg.ops);
    match cfg.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                id: &'a str,
                operator: &'a str,
                target: Option<usize>,
                payload: &'a str,
                program: String,
            }
            let rows: Vec<Row> = mutants
                .iter()
                .map(|m| Row {
                    id: &m.id,
                    operator: m.operator.code(),
                    target: m.target,
                    payload: &m.payload,
                    program: serialize(&m.program),
                })
                .collect();
            print!("{}", json(&rows));
        }
        Format::Csv => {
            let header = vec!["id".into(), "operator".into(), "target".into(), "payload".into()];
            let rows = mutants.iter().map(|m| {
                vec![
                    m.id.clone(),
                    m.operator.code().to_string(),
                    m.target.map_or_else(String::new, |t| t.to_string()),
                    m.payload.clone(),
                ]
            });
            print!("{}", csv_text(std::iter::once(header).chain(rows)));
        }
        Format::Table => {
            for m in &mutants {
                let target = m.target.map_or_else(|| "-".to_string(), |t| t.to_string());
                println!("{:<14} {:>4}  {}", m.id, target, m.payload);
            }
            println!("{} mutant(s) with {}", mutants.len(), cfg.ops);
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn test(program: &Path, suite_path: &Path, cfg: &Config) -> Result<ExitCode> {
    let p = load_program(program)?;
    let suite = load_suite(suite_path, cfg)?;
    let verdicts = run_suite(&p, &suite, &cfg.run_config()).map_err(|e| anyhow!("{}: {e}", suite_path.display()))?;
    match cfg.format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = suite
                .tests
                .iter()
                .zip(&verdicts)
                .map(|(t, v)| serde_json::json!({ "test": t.name, "verdict": v }))
                .collect();
            print!("{}", json(&rows));
        }
        Format::Csv => {
            let header = vec!["test".into(), "outcome".into(), "tvd".into()];
            let rows = suite.tests.iter().zip(&verdicts).map(|(t, v)| {
                vec![
                    t.name.clone(),
                    format!("{:?}", v.outcome),
                    v.tvd.map_or_else(String::new, |d| d.to_string()),
                ]
            });
            print!("{}", csv_text(std::iter::once(header).chain(rows)));
        }
        Format::Table => {
            for (t, v) in suite.tests.iter().zip(&verdicts) {
                let detail = match (&v.tvd, &v.error) {
                    (Some(d), _) => format!("tvd {d:.3e}"),
                    (None, Some(e)) => e.clone(),
                    _ => String::new(),
                };
                println!("{:<24} {:<8} {}", t.name, format!("{:?}", v.outcome), detail);
            }
            let passed = verdicts.iter().filter(|v| v.passed()).count();
            println!("{passed}/{} passed", verdicts.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn report_csv(r: &SuspiciousnessReport) -> String {
    let header = ["id", "line", "score", "best_rank", "worst_rank", "statement"].map(String::from).to_vec();
    let rows = r.ranked.iter().map(|&id| {
        let s = &r.statements[id];
        vec![
            s.id.to_string(),
            s.line.to_string(),
            s.score.to_string(),
            s.best_rank.to_string(),
            s.worst_rank.to_string(),
            s.text.clone(),
        ]
    });
    csv_text(std::iter::once(header).chain(rows))
}

pub fn localize(
    program: &Path,
    suite_path: &Path,
    sbfl: bool,
    reference: Option<&Path>,
    faulty: &[usize],
    cfg: &Config,
) -> Result<ExitCode> {
    let p = load_program(program)?;
    let suite = load_suite(suite_path, cfg)?;
    let faulty: Option<BTreeSet<usize>> = match reference {
        Some(path) => {
            let r = load_program(path)?;
            Some(diff_ground_truth(&p, &r).map_err(|e| anyhow!("{}: {e}", path.display()))?)
        }
        None if !faulty.is_empty() => Some(faulty.iter().copied().collect()),
        None => None,
    };
    let methods: &[Method] = if sbfl { &Method::ALL } else { &[Method::Muse] };
    let analysis = match analyze(&p, &suite, &cfg.ops, methods, &cfg.run_config()) {
        Ok(a) => a,
        Err(LocalizeError::NoFailingTests) => {
            eprintln!("{}: no failing tests; nothing to localize", program.display());
            return Ok(ExitCode::from(NO_FAILING_TESTS));
        }
        Err(e @ LocalizeError::Runner(_)) => bail!("{}: {e}", suite_path.display()),
        Err(e) => bail!("{e}"),
    };
    let mut reports = Vec::new();
    for report in &analysis.reports {
        let report = match &faulty {
            Some(f) => report.clone().with_exam(f).map_err(|e| anyhow!("{e}"))?,
            None => report.clone(),
        };
        if report.degenerate {
            eprintln!(
                "warning: {} cannot separate statements with {} test(s); its scores are degenerate",
                report.method,
                suite.len()
            );
        }
        reports.push(report);
    }

    match cfg.format {
        Format::Json => print!("{}", json(&reports)),
        Format::Csv => {
            for r in &reports {
                print!("{}", report_csv(r));
            }
        }
        Format::Table => {
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                print!("{}", r.table());
            }
            let summaries = analysis.mutant_summaries();
            let changing = summaries.iter().filter(|m| m.behavior_changing).count();
            println!("\n{} mutant(s), {changing} behavior-changing", summaries.len());
            for m in summaries.iter().filter(|m| m.behavior_changing && m.experimental) {
                println!("  {} ({}) changes behavior: {}", m.id, m.operator.description(), m.payload);
            }
        }
    }

    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for r in &reports {
            write_file(&dir.join(format!("{}.json", r.method)), &r.to_json())?;
        }
        write_file(&dir.join("mutants.json"), &json(&analysis.mutant_summaries()))?;
        write_file(&dir.join("matrix.csv"), &analysis.matrix.to_csv())?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn inject(reference: &Path, suite_path: &Path, out: &Path, prefix: Option<String>, cfg: &Config) -> Result<ExitCode> {
    let p = load_program(reference)?;
    let suite = load_suite(suite_path, cfg)?;
    let prefix = prefix.unwrap_or_else(|| {
        reference
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "item".into())
    });
    let items = bench::inject_faults(&p, &suite, &cfg.ops, &cfg.run_config(), &prefix).map_err(|e| match e {
        BenchError::Runner(e) => anyhow!("{}: {e}", suite_path.display()),
        e => anyhow!("{}: {e}", reference.display()),
    })?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    for item in &items {
        item.save(out)?;
    }
    println!("{} item(s) written to {}", items.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn parse_methods(text: &str) -> Result<Vec<Method>> {
    let mut methods: Vec<Method> = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m: Method = part.parse().map_err(|e: String| anyhow!(e))?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    Ok(methods)
}

pub fn evaluate(dir: &Path, methods: &str, cfg: &Config) -> Result<ExitCode> {
    let methods = parse_methods(methods).context("--methods")?;
    let run = cfg.run_config();
    let (items, mut failures) = bench::load_benchmark(dir, &run)?;
    for f in &failures {
        eprintln!("skipping {}: {}", f.item, f.message);
    }
    if items.is_empty() {
        bail!("no usable benchmark items in {}", dir.display());
    }
    let mut evaluation = bench::evaluate(&items, &methods, &cfg.ops, &run)?;
    for f in &evaluation.failures {
        eprintln!("item {} failed: {}", f.item, f.message);
    }
    if evaluation.failures.len() == items.len() {
        bail!("every benchmark item failed");
    }
    failures.append(&mut evaluation.failures);
    evaluation.failures = failures;

    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("qfl-eval"));
    evaluation.write(&out)?;
    let stats = evaluation.stats();
    match cfg.format {
        Format::Json => print!("{}", stats.to_json()),
        Format::Csv => print!("{}", evaluation.records_csv()),
        Format::Table => print!("{}", stats_table(&stats)),
    }
    eprintln!("{} record(s) written to {}", evaluation.records.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn stats_table(stats: &bench::StatsReport) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(out, "{} item(s)", stats.items);
    let _ = writeln!(out, "{:<10} {:<9} {:>6} {:>10} {:>10}", "method", "group", "items", "exam_best", "exam_worst");
    for m in &stats.medians {
        let _ = writeln!(
            out,
            "{:<10} {:<9} {:>6} {:>10.2} {:>10.2}",
            m.method, m.group, m.items, m.exam_best, m.exam_worst
        );
    }
    if !stats.comparisons.is_empty() {
        let _ = writeln!(out, "\nmuse vs     group     scenario  pairs    delta   p-value");
        for c in &stats.comparisons {
            let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
            let _ = writeln!(
                out,
                "{:<11} {:<9} {:<8} {:>6} {:>8} {:>9}",
                c.baseline.to_string(),
                c.group,
                c.scenario,
                c.pairs,
                fmt(c.cliffs_delta),
                fmt(c.p_value)
            );
        }
    }
    let _ = writeln!(out, "\nbehavior-changing mutants");
    for o in &stats.accounting.operators {
        let _ = writeln!(out, "  {:<4} {:<9} {:>7} total {:>8.2} per item", o.operator.code(), o.category, o.total, o.avg_per_item);
    }
    for category in [Category::Quantum, Category::Classical] {
        if let Some(c) = stats.accounting.category(category) {
            let _ = writeln!(out, "  {:<14} {:>7} total {:>8.2} per op", c.category, c.total, c.avg_per_op);
        }
    }
    out
}

pub fn compare(records: &Path, methods: Option<&str>, out: Option<&Path>) -> Result<ExitCode> {
    let text = fs::read_to_string(records).with_context(|| format!("cannot read {}", records.display()))?;
    let (rows, ops) = bench::read_records(&text).map_err(|e| anyhow!("{}: {e}", records.display()))?;
    let methods = match methods {
        Some(m) => parse_methods(m)?,
        None => Method::ALL.into_iter().filter(|m| rows.iter().any(|r| r.method == *m)).collect(),
    };
    let stats = bench::stats_report(&rows, &methods, &ops);
    match out {
        Some(path) => write_file(path, &stats.to_json())?,
        None => print!("{}", stats.to_json()),
    }
    Ok(ExitCode::SUCCESS)
}
