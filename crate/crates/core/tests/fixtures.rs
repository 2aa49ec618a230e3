use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qfl_core::bench::{inject_faults, load_benchmark, BenchmarkItem, Origin};
use qfl_core::frontend::{diff_ground_truth, parse, serialize};
use qfl_core::mutate::OperatorSet;
use qfl_core::runner::{run_suite, RunConfig, TestSuite};

const SEEDS: [&str; 5] = ["bell", "ghz3", "teleport", "grover2", "qft_adder"];

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn shipped() -> Vec<BenchmarkItem> {
    let (items, failures) = load_benchmark(&fixtures().join("benchmark"), &RunConfig::default()).unwrap();
    assert!(failures.is_empty(), "{failures:?}");
    items
}

#[test]
fn seeds_pass_their_suites() {
    for seed in SEEDS {
        let dir = fixtures().join("seeds");
        let p = parse(&std::fs::read_to_string(dir.join(format!("{seed}.qasm"))).unwrap()).unwrap();
        let suite = TestSuite::load(&dir.join(format!("{seed}.tests.json"))).unwrap();
        let verdicts = run_suite(&p, &suite, &RunConfig::default()).unwrap();
        assert!(verdicts.iter().all(|v| v.passed()), "{seed}");
    }
}

#[test]
fn shipped_benchmark_covers_every_seed() {
    let items = shipped();
    let mut injected: BTreeMap<&str, usize> = BTreeMap::new();
    let mut curated = 0;
    for item in &items {
        match item.origin {
            Origin::Injected { .. } => {
                let seed = SEEDS
                    .iter()
                    .find(|s| item.id.starts_with(&format!("{s}-")))
                    .unwrap_or_else(|| panic!("{} has no seed", item.id));
                *injected.entry(seed).or_default() += 1;
            }
            Origin::Curated => curated += 1,
        }
    }
    assert_eq!(injected.len(), SEEDS.len());
    assert!(injected.values().sum::<usize>() >= 30);
    assert!(curated >= 8);
}

#[test]
fn curated_ground_truth_is_the_diff() {
    for item in shipped().iter().filter(|i| i.origin == Origin::Curated) {
        let diff = diff_ground_truth(&item.buggy, &item.reference).unwrap();
        assert_eq!(diff, item.ground_truth, "{}", item.id);
    }
}

#[test]
fn injected_items_regenerate_from_seeds() {
    let items = shipped();
    let cfg = RunConfig::default();
    for seed in SEEDS {
        let dir = fixtures().join("seeds");
        let p = parse(&std::fs::read_to_string(dir.join(format!("{seed}.qasm"))).unwrap()).unwrap();
        let suite = TestSuite::load(&dir.join(format!("{seed}.tests.json"))).unwrap();
        let mut fresh = inject_faults(&p, &suite, &OperatorSet::default(), &cfg, seed).unwrap();
        fresh.sort_by(|a, b| a.id.cmp(&b.id));
        let stored: Vec<&BenchmarkItem> = items
            .iter()
            .filter(|i| matches!(i.origin, Origin::Injected { .. }) && i.id.starts_with(&format!("{seed}-")))
            .collect();
        assert_eq!(fresh.len(), stored.len(), "{seed}");
        for (a, b) in fresh.iter().zip(stored) {
            assert_eq!(a.id, b.id);
            assert_eq!(serialize(&a.buggy), serialize(&b.buggy));
            assert_eq!(a.ground_truth, b.ground_truth, "{}", a.id);
            assert_eq!(a.origin, b.origin);
        }
    }
}
