use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{cliffs_delta, ecdf, median, wilcoxon_one_sided};
use super::{BenchError, BenchmarkItem, ItemFailure, Origin};
use crate::localize::{analyze_matrix, Method};
use crate::mutate::{generate_mutants, Category, MutationOperator, OperatorSet};
use crate::runner::{matrix_in_current_pool, RunConfig};

/// One (item, method) result.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub item: String,
    pub origin: Origin,
    pub method: Method,
    pub exam_best: f64,
    pub exam_worst: f64,
    pub statements: usize,
    pub degenerate: bool,
    /// Behavior-changing mutants of the buggy program, per configured
    /// operator. Identical across the methods of one item.
    pub behavior_changing: BTreeMap<MutationOperator, u64>,
    pub wall_time: Duration,
}

impl EvalRecord {
    pub fn behavior_changing_in(&self, category: Category) -> u64 {
        self.behavior_changing
            .iter()
            .filter(|(op, _)| op.category() == category)
            .map(|(_, n)| n)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub methods: Vec<Method>,
    pub ops: OperatorSet,
    /// Ordered by item id, then by method order.
    pub records: Vec<EvalRecord>,
    pub failures: Vec<ItemFailure>,
}

/// Localize the fault of every item with every method.
///
/// Items are evaluated in parallel on `cfg.workers` threads; a failing item
/// is recorded in `failures` and does not stop the others.
pub fn evaluate(
    items: &[BenchmarkItem],
    methods: &[Method],
    ops: &OperatorSet,
    cfg: &RunConfig,
) -> Result<Evaluation, BenchError> {
    let mut sorted: Vec<&BenchmarkItem> = items.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let results: Vec<Result<Vec<EvalRecord>, BenchError>> = if methods.is_empty() {
        sorted.iter().map(|_| Ok(Vec::new())).collect()
    } else {
        cfg.install(|| {
            sorted
                .par_iter()
                .map(|item| evaluate_item(item, methods, ops, cfg))
                .collect()
        })?
    };
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (item, result) in sorted.iter().zip(results) {
        match result {
            Ok(r) => records.extend(r),
            Err(e) => failures.push(ItemFailure {
                item: item.id.clone(),
                message: e.to_string(),
            }),
        }
    }
    Ok(Evaluation {
        methods: methods.to_vec(),
        ops: ops.clone(),
        records,
        failures,
    })
}

fn evaluate_item(
    item: &BenchmarkItem,
    methods: &[Method],
    ops: &OperatorSet,
    cfg: &RunConfig,
) -> Result<Vec<EvalRecord>, BenchError> {
    let start = Instant::now();
    item.suite.check(&item.buggy)?;
    let mutants = generate_mutants(&item.buggy, ops);
    let matrix = matrix_in_current_pool(&item.buggy, &mutants, &item.suite, cfg);
    let behavior_changing: BTreeMap<MutationOperator, u64> = ops
        .iter()
        .map(|op| {
            let n = matrix
                .mutant_rows()
                .iter()
                .filter(|r| r.operator == Some(op) && r.behavior_changing)
                .count();
            (op, n as u64)
        })
        .collect();
    let analysis = analyze_matrix(&item.buggy, mutants, matrix, methods)?;
    let wall_time = start.elapsed();
    analysis
        .reports
        .into_iter()
        .map(|report| {
            let report = report.with_exam(&item.ground_truth)?;
            let exam = report.exam.expect("exam attached");
            Ok(EvalRecord {
                item: item.id.clone(),
                origin: item.origin,
                method: report.method,
                exam_best: exam.best,
                exam_worst: exam.worst,
                statements: item.buggy.len(),
                degenerate: report.degenerate,
                behavior_changing: behavior_changing.clone(),
                wall_time,
            })
        })
        .collect()
}

const FIXED_COLUMNS: [&str; 9] = [
    "item",
    "origin",
    "method",
    "exam_best",
    "exam_worst",
    "statements",
    "degenerate",
    "bc_quantum",
    "bc_classical",
];

/// Records as CSV. Wall time is left out so the file only depends on the
/// inputs; see [`timings_csv`].
pub fn records_csv(records: &[EvalRecord], ops: &OperatorSet) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(ops.iter().map(|op| format!("bc_{}", op.code())));
    w.write_record(&header).expect("in-memory write");
    for r in records {
        let mut row = vec![
            r.item.clone(),
            r.origin.to_string(),
            r.method.to_string(),
            r.exam_best.to_string(),
            r.exam_worst.to_string(),
            r.statements.to_string(),
            r.degenerate.to_string(),
            r.behavior_changing_in(Category::Quantum).to_string(),
            r.behavior_changing_in(Category::Classical).to_string(),
        ];
        row.extend(ops.iter().map(|op| r.behavior_changing.get(&op).copied().unwrap_or(0).to_string()));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Parse a `records.csv` back, recovering the operator set from its header.
/// Wall times read back as zero.
pub fn read_records(text: &str) -> Result<(Vec<EvalRecord>, OperatorSet), BenchError> {
    let bad = |message: String| BenchError::Records(message);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    for (i, name) in FIXED_COLUMNS.iter().enumerate() {
        if header.get(i) != Some(*name) {
            return Err(bad(format!("column {} should be `{name}`", i + 1)));
        }
    }
    let op_columns: Vec<MutationOperator> = header
        .iter()
        .skip(FIXED_COLUMNS.len())
        .map(|h| {
            h.strip_prefix("bc_")
                .and_then(|code| code.parse().ok())
                .ok_or_else(|| bad(format!("unexpected column `{h}`")))
        })
        .collect::<Result<_, _>>()?;
    let ops = OperatorSet::new(op_columns.iter().copied()).map_err(|e| bad(e.to_string()))?;

    let mut records = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let at = |i: usize| row.get(i).unwrap_or("");
        let ctx = |e: String| bad(format!("row {}: {e}", line + 2));
        let num = |i: usize| at(i).parse::<f64>().map_err(|e| ctx(format!("{}: {e}", FIXED_COLUMNS[i])));
        let count = |i: usize| at(i).parse::<u64>().map_err(|e| ctx(format!("column {}: {e}", i + 1)));
        let behavior_changing = op_columns
            .iter()
            .enumerate()
            .map(|(k, &op)| count(FIXED_COLUMNS.len() + k).map(|n| (op, n)))
            .collect::<Result<_, _>>()?;
        records.push(EvalRecord {
            item: at(0).to_string(),
            origin: at(1).parse().map_err(ctx)?,
            method: at(2).parse().map_err(ctx)?,
            exam_best: num(3)?,
            exam_worst: num(4)?,
            statements: count(5)? as usize,
            degenerate: at(6).parse().map_err(|e| ctx(format!("degenerate: {e}")))?,
            behavior_changing,
            wall_time: Duration::ZERO,
        });
    }
    Ok((records, ops))
}

pub fn timings_csv(records: &[EvalRecord]) -> String {
    let mut out = String::from("item,method,wall_ms\n");
    for r in records {
        let _ = writeln!(out, "{},{},{:.3}", r.item, r.method, r.wall_time.as_secs_f64() * 1e3);
    }
    out
}

/// Origin groups used in ECDFs and stats, in output order.
pub const GROUPS: [&str; 3] = ["all", "injected", "curated"];

fn in_group(r: &EvalRecord, group: &str) -> bool {
    group == "all" || r.origin.scenario() == group
}

fn exam(r: &EvalRecord, scenario: &str) -> f64 {
    if scenario == "best" {
        r.exam_best
    } else {
        r.exam_worst
    }
}

/// `(file name, contents)` for every `ecdf_<method>_<scenario>.csv`.
pub fn ecdf_tables(records: &[EvalRecord], methods: &[Method]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for &method in methods {
        for scenario in ["best", "worst"] {
            let mut text = String::from("group,exam,fraction\n");
            for group in GROUPS {
                let values: Vec<f64> = records
                    .iter()
                    .filter(|r| r.method == method && in_group(r, group))
                    .map(|r| exam(r, scenario))
                    .collect();
                for (x, f) in ecdf(&values) {
                    let _ = writeln!(text, "{group},{x},{f}");
                }
            }
            out.push((format!("ecdf_{method}_{scenario}.csv"), text));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianRow {
    pub method: Method,
    pub group: String,
    pub items: usize,
    pub exam_best: f64,
    pub exam_worst: f64,
}

/// MUSE against one baseline on the items both scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub baseline: Method,
    pub group: String,
    pub scenario: String,
    pub pairs: usize,
    /// Negative when MUSE's EXAM values tend to be lower.
    pub cliffs_delta: Option<f64>,
    /// One-sided, alternative: MUSE lower.
    pub p_value: Option<f64>,
    pub exact: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorCount {
    pub operator: MutationOperator,
    pub category: Category,
    pub total: u64,
    pub avg_per_item: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryCount {
    pub category: Category,
    pub operators: usize,
    pub total: u64,
    /// `total / operators`; 0 when no operator of the category ran.
    pub avg_per_op: f64,
}

/// Behavior-changing mutants over all items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Accounting {
    pub items: usize,
    pub operators: Vec<OperatorCount>,
    pub categories: Vec<CategoryCount>,
}

impl Accounting {
    pub fn category(&self, category: Category) -> Option<&CategoryCount> {
        self.categories.iter().find(|c| c.category == category)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub items: usize,
    pub methods: Vec<Method>,
    pub medians: Vec<MedianRow>,
    pub comparisons: Vec<Comparison>,
    pub accounting: Accounting,
}

impl StatsReport {
    pub fn median(&self, method: Method, group: &str) -> Option<&MedianRow> {
        self.medians.iter().find(|m| m.method == method && m.group == group)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize") + "\n"
    }
}

/// Medians per method and origin group, MUSE-vs-SBFL tests, and mutant
/// accounting.
pub fn stats_report(records: &[EvalRecord], methods: &[Method], ops: &OperatorSet) -> StatsReport {
    let mut medians = Vec::new();
    for &method in methods {
        for group in GROUPS {
            let rows: Vec<&EvalRecord> = records.iter().filter(|r| r.method == method && in_group(r, group)).collect();
            let best: Vec<f64> = rows.iter().map(|r| r.exam_best).collect();
            let worst: Vec<f64> = rows.iter().map(|r| r.exam_worst).collect();
            if let (Some(b), Some(w)) = (median(&best), median(&worst)) {
                medians.push(MedianRow {
                    method,
                    group: group.to_string(),
                    items: rows.len(),
                    exam_best: b,
                    exam_worst: w,
                });
            }
        }
    }

    let mut comparisons = Vec::new();
    if methods.contains(&Method::Muse) {
        for &baseline in methods.iter().filter(|m| m.is_sbfl()) {
            for group in GROUPS {
                for scenario in ["best", "worst"] {
                    if let Some(c) = compare(records, baseline, group, scenario) {
                        comparisons.push(c);
                    }
                }
            }
        }
    }

    let mut items: BTreeMap<&str, &EvalRecord> = BTreeMap::new();
    for r in records {
        items.entry(r.item.as_str()).or_insert(r);
    }
    let n_items = items.len();
    let operators: Vec<OperatorCount> = ops
        .iter()
        .map(|op| {
            let total: u64 = items.values().map(|r| r.behavior_changing.get(&op).copied().unwrap_or(0)).sum();
            OperatorCount {
                operator: op,
                category: op.category(),
                total,
                avg_per_item: if n_items == 0 { 0.0 } else { total as f64 / n_items as f64 },
            }
        })
        .collect();
    let categories = [Category::Quantum, Category::Classical]
        .into_iter()
        .map(|category| {
            let members: Vec<&OperatorCount> = operators.iter().filter(|o| o.category == category).collect();
            let total: u64 = members.iter().map(|o| o.total).sum();
            CategoryCount {
                category,
                operators: members.len(),
                total,
                avg_per_op: if members.is_empty() {
                    0.0
                } else {
                    total as f64 / members.len() as f64
                },
            }
        })
        .collect();

    StatsReport {
        items: n_items,
        methods: methods.to_vec(),
        medians,
        comparisons,
        accounting: Accounting {
            items: n_items,
            operators,
            categories,
        },
    }
}

fn compare(records: &[EvalRecord], baseline: Method, group: &str, scenario: &str) -> Option<Comparison> {
    let by_item = |method: Method| -> BTreeMap<&str, f64> {
        records
            .iter()
            .filter(|r| r.method == method && in_group(r, group))
            .map(|r| (r.item.as_str(), exam(r, scenario)))
            .collect()
    };
    let muse = by_item(Method::Muse);
    let base = by_item(baseline);
    let pairs: Vec<(f64, f64)> = muse
        .iter()
        .filter_map(|(item, &m)| base.get(item).map(|&b| (m, b)))
        .collect();
    if pairs.is_empty() {
        return None;
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let delta = cliffs_delta(&xs, &ys).ok();
    let (p_value, exact, note) = match wilcoxon_one_sided(&pairs) {
        Ok(w) => (Some(w.p_value), Some(w.exact), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    Some(Comparison {
        baseline,
        group: group.to_string(),
        scenario: scenario.to_string(),
        pairs: pairs.len(),
        cliffs_delta: delta,
        p_value,
        exact,
        note,
    })
}

impl Evaluation {
    pub fn records_csv(&self) -> String {
        records_csv(&self.records, &self.ops)
    }

    pub fn stats(&self) -> StatsReport {
        stats_report(&self.records, &self.methods, &self.ops)
    }

    /// Write `records.csv`, the ECDF tables, `stats.json`, `timings.csv`
    /// and, if any item failed, `failures.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), BenchError> {
        fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
        let mut files = vec![
            ("records.csv".to_string(), self.records_csv()),
            ("stats.json".to_string(), self.stats().to_json()),
            ("timings.csv".to_string(), timings_csv(&self.records)),
        ];
        files.extend(ecdf_tables(&self.records, &self.methods));
        if !self.failures.is_empty() {
            let text = serde_json::to_string_pretty(&self.failures).expect("failures serialize") + "\n";
            files.push(("failures.json".to_string(), text));
        }
        for (name, text) in files {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| BenchError::io(&path, e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::frontend::parse;
    use crate::runner::{TestCase, TestSuite};

    fn flip_item(id: &str) -> BenchmarkItem {
        // reference: x then measure; buggy uses z instead of x
        BenchmarkItem {
            id: id.into(),
            buggy: parse("qreg q[1]; creg c[1]; z q[0]; measure q[0] -> c[0];").unwrap(),
            reference: parse("qreg q[1]; creg c[1]; x q[0]; measure q[0] -> c[0];").unwrap(),
            suite: TestSuite::new(vec![TestCase::new("one", &[("1", 1.0)])]),
            ground_truth: BTreeSet::from([0]),
            origin: Origin::Injected {
                operator: MutationOperator::Qgr,
            },
            description: None,
        }
    }

    #[test]
    fn single_item_top_ranked() {
        let ev = evaluate(&[flip_item("a")], &[Method::Muse], &OperatorSet::default(), &RunConfig::default()).unwrap();
        assert_eq!(ev.records.len(), 1);
        let r = &ev.records[0];
        // z is statement 0 of 2 and the only one with a fixing mutant
        assert_eq!((r.exam_best, r.exam_worst), (50.0, 50.0));
        assert!(r.behavior_changing[&MutationOperator::Qgr] > 0);
    }

    #[test]
    fn no_methods_no_records() {
        let ev = evaluate(&[flip_item("a")], &[], &OperatorSet::default(), &RunConfig::default()).unwrap();
        assert!(ev.records.is_empty());
        assert!(ecdf_tables(&ev.records, &ev.methods).is_empty());
        let s = ev.stats();
        assert!(s.medians.is_empty() && s.comparisons.is_empty());
    }

    #[test]
    fn failing_items_are_recorded() {
        let mut bad = flip_item("b");
        bad.buggy = bad.reference.clone();
        let ev = evaluate(
            &[bad, flip_item("a")],
            &Method::ALL,
            &OperatorSet::default(),
            &RunConfig::default(),
        )
        .unwrap();
        assert_eq!(ev.records.len(), 3);
        assert_eq!(ev.failures.len(), 1);
        assert_eq!(ev.failures[0].item, "b");
    }

    #[test]
    fn records_round_trip_through_csv() {
        let ev = evaluate(
            &[flip_item("a"), flip_item("c")],
            &Method::ALL,
            &OperatorSet::default(),
            &RunConfig::default(),
        )
        .unwrap();
        let text = ev.records_csv();
        let (back, ops) = read_records(&text).unwrap();
        assert_eq!(ops, ev.ops);
        assert_eq!(records_csv(&back, &ops), text);
        assert_eq!(stats_report(&back, &ev.methods, &ops), ev.stats());
    }

    #[test]
    fn muse_only_has_no_comparisons() {
        let ev = evaluate(&[flip_item("a")], &[Method::Muse], &OperatorSet::default(), &RunConfig::default()).unwrap();
        assert!(ev.stats().comparisons.is_empty());
        let ev = evaluate(&[flip_item("a")], &Method::ALL, &OperatorSet::default(), &RunConfig::default()).unwrap();
        // one item per group with data: all + injected, best + worst, two baselines
        assert_eq!(ev.stats().comparisons.len(), 8);
    }
}
