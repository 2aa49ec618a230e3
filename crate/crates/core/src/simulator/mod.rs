//! Exact branching statevector simulation.
//!
//! Mid-circuit measurement splits a branch into one branch per outcome
//! with nonzero probability; each branch keeps its own classical bits, so
//! guards are evaluated per branch. Nothing is sampled: the final
//! distribution over classical bitstrings is exact.

mod catalog;
mod sample;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use thiserror::Error;

use crate::frontend::{EvalError, Instruction, Program};
pub use catalog::{GateCatalog, Matrix, UNITARITY_TOLERANCE};
pub use sample::sample;

pub const DEFAULT_MAX_QUBITS: usize = 16;
pub const DEFAULT_MAX_BRANCHES: usize = 4096;
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(10);
/// Measurement outcomes with probability at or below this are dropped.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{branches} branches exceed the limit of {limit}")]
    BranchExplosion { branches: usize, limit: usize },
    #[error("time budget of {0:?} exceeded")]
    BudgetExceeded(Duration),
    #[error("statement {statement}: division by zero in a gate parameter")]
    DivisionByZero { statement: usize },
    #[error("statement {statement}: gate parameter is not finite")]
    NonFiniteParameter { statement: usize },
    #[error("{qubits} qubits exceed the simulator cap of {cap}")]
    TooManyQubits { qubits: usize, cap: usize },
    #[error("{0} classical bits exceed the limit of 64")]
    TooManyClbits(usize),
    #[error("initial state {state} does not fit in {qubits} qubits")]
    InitialStateOutOfRange { state: u64, qubits: usize },
    #[error("shots must be positive")]
    NoShots,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub max_branches: usize,
    pub budget: Duration,
    pub max_qubits: usize,
    pub prune_threshold: f64,
    /// Computational basis state the qubits start in (bit `i` = flat qubit `i`).
    pub initial_state: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_branches: DEFAULT_MAX_BRANCHES,
            budget: DEFAULT_BUDGET,
            max_qubits: DEFAULT_MAX_QUBITS,
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
            initial_state: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionTrace {
    /// Statements executed in at least one branch.
    pub covered: BTreeSet<usize>,
    /// Classical bitstring (highest clbit first) to probability.
    pub distribution: BTreeMap<String, f64>,
    /// Number of branches alive after the last statement.
    pub branch_count: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub clbits: u64,
    pub amplitudes: Vec<Complex64>,
    pub weight: f64,
}

impl Branch {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

enum Op {
    Unitary { targets: Vec<usize>, matrix: Matrix },
    Measure { qubit: usize, clbit: usize },
    Reset { qubit: usize },
    Nop,
}

struct Step {
    id: usize,
    guard: Option<(u32, u64, u64)>, // (offset, mask, value)
    op: Op,
}

fn compile(p: &Program) -> Result<Vec<Step>, SimError> {
    let catalog = GateCatalog::global();
    p.statements
        .iter()
        .map(|s| {
            let guard = s.guard.as_ref().map(|g| {
                let reg = p.register(&g.register).expect("validated guard register");
                let offset = p.register_offset(&g.register).unwrap() as u32;
                let mask = if reg.size >= 64 { u64::MAX } else { (1u64 << reg.size) - 1 };
                (offset, mask, g.value)
            });
            let op = match &s.instruction {
                Instruction::Gate {
                    gate,
                    params,
                    qubits,
                } => {
                    let values = params
                        .iter()
                        .map(|e| match e.eval() {
                            Ok(v) if v.is_finite() => Ok(v),
                            Ok(_) => Err(SimError::NonFiniteParameter { statement: s.id }),
                            Err(EvalError::DivisionByZero) => {
                                Err(SimError::DivisionByZero { statement: s.id })
                            }
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Op::Unitary {
                        targets: qubits.iter().map(|q| p.flat_index(q)).collect(),
                        matrix: catalog.matrix(*gate, &values),
                    }
                }
                Instruction::Measure { qubit, clbit } => Op::Measure {
                    qubit: p.flat_index(qubit),
                    clbit: p.flat_index(clbit),
                },
                Instruction::Reset { qubit } => Op::Reset {
                    qubit: p.flat_index(qubit),
                },
                Instruction::Barrier { .. } => Op::Nop,
            };
            Ok(Step { id: s.id, guard, op })
        })
        .collect()
}

/// Apply a small unitary to `targets` of a full statevector.
pub fn apply_unitary(amps: &mut [Complex64], targets: &[usize], m: &Matrix) {
    let k = targets.len();
    let dim = 1usize << k;
    let target_mask: usize = targets.iter().map(|t| 1usize << t).sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|local| {
            targets
                .iter()
                .enumerate()
                .filter(|(j, _)| local >> j & 1 == 1)
                .map(|(_, t)| 1usize << t)
                .sum()
        })
        .collect();
    let mut local_in = vec![Complex64::new(0.0, 0.0); dim];
    for base in 0..amps.len() {
        if base & target_mask != 0 {
            continue;
        }
        for (l, off) in offsets.iter().enumerate() {
            local_in[l] = amps[base | off];
        }
        for (row, off) in offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, a) in local_in.iter().enumerate() {
                acc += m.data[row * dim + col] * a;
            }
            amps[base | off] = acc;
        }
    }
}

/// Project `branch` on both outcomes of measuring `qubit`. Returns the
/// surviving `(outcome, branch)` pairs with weights already scaled.
fn split(branch: Branch, qubit: usize, prune: f64) -> Vec<(u64, Branch)> {
    let bit = 1usize << qubit;
    let p1: f64 = branch
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(i, _)| i & bit != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let total = branch.norm_sqr();
    let p0 = (total - p1).max(0.0);
    let outcomes: Vec<(u64, f64)> = match (p0 > prune, p1 > prune) {
        (true, true) => vec![(0, p0), (1, p1)],
        (true, false) => vec![(0, total)],
        (false, true) => vec![(1, total)],
        // zero vector cannot happen for a normalized state
        (false, false) => vec![(0, total)],
    };
    let single = outcomes.len() == 1;
    let mut out = Vec::with_capacity(outcomes.len());
    for (outcome, prob) in outcomes {
        let scale = 1.0 / prob.sqrt();
        let keep = if outcome == 1 { bit } else { 0 };
        let amplitudes = branch
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| if i & bit == keep { a * scale } else { Complex64::new(0.0, 0.0) })
            .collect();
        let weight = if single {
            branch.weight
        } else {
            branch.weight * prob / total
        };
        out.push((
            outcome,
            Branch {
                clbits: branch.clbits,
                amplitudes,
                weight,
            },
        ));
    }
    out
}

/// Execute `p` exactly.
pub fn run(p: &Program, opts: &RunOptions) -> Result<ExecutionTrace, SimError> {
    let start = Instant::now();
    let nq = p.qubit_count();
    let nc = p.clbit_count();
    if nq > opts.max_qubits {
        return Err(SimError::TooManyQubits {
            qubits: nq,
            cap: opts.max_qubits,
        });
    }
    if nc > 64 {
        return Err(SimError::TooManyClbits(nc));
    }
    if nq < 64 && opts.initial_state >> nq != 0 {
        return Err(SimError::InitialStateOutOfRange {
            state: opts.initial_state,
            qubits: nq,
        });
    }
    let steps = compile(p)?;

    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << nq];
    amplitudes[opts.initial_state as usize] = Complex64::new(1.0, 0.0);
    let mut branches = vec![Branch {
        clbits: 0,
        amplitudes,
        weight: 1.0,
    }];
    let mut covered = BTreeSet::new();

    for step in &steps {
        if start.elapsed() >= opts.budget {
            return Err(SimError::BudgetExceeded(opts.budget));
        }
        let mut next = Vec::with_capacity(branches.len());
        for mut branch in branches {
            let taken = step
                .guard
                .is_none_or(|(offset, mask, value)| (branch.clbits >> offset) & mask == value);
            if !taken {
                next.push(branch);
                continue;
            }
            covered.insert(step.id);
            match &step.op {
                Op::Unitary { targets, matrix } => {
                    apply_unitary(&mut branch.amplitudes, targets, matrix);
                    next.push(branch);
                }
                Op::Measure { qubit, clbit } => {
                    for (outcome, mut b) in split(branch, *qubit, opts.prune_threshold) {
                        b.clbits = (b.clbits & !(1u64 << clbit)) | (outcome << clbit);
                        next.push(b);
                    }
                }
                Op::Reset { qubit } => {
                    for (outcome, mut b) in split(branch, *qubit, opts.prune_threshold) {
                        if outcome == 1 {
                            let x = GateCatalog::global().matrix(crate::gate::Gate::X, &[]);
                            apply_unitary(&mut b.amplitudes, &[*qubit], &x);
                        }
                        next.push(b);
                    }
                }
                Op::Nop => next.push(branch),
            }
        }
        if next.len() > opts.max_branches {
            return Err(SimError::BranchExplosion {
                branches: next.len(),
                limit: opts.max_branches,
            });
        }
        branches = next;
    }

    let mut distribution = BTreeMap::new();
    for b in &branches {
        *distribution.entry(bitstring(b.clbits, nc)).or_insert(0.0) += b.weight;
    }
    Ok(ExecutionTrace {
        covered,
        distribution,
        branch_count: branches.len(),
        elapsed: start.elapsed(),
    })
}

/// `width` bits of `bits`, most significant first.
pub fn bitstring(bits: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Final statevector of a program without measurements, resets or guards.
/// Returns `None` for programs that need branching.
pub fn statevector(p: &Program, opts: &RunOptions) -> Result<Option<Vec<Complex64>>, SimError> {
    if p
        .statements
        .iter()
        .any(|s| s.guard.is_some() || matches!(s.instruction, Instruction::Measure { .. } | Instruction::Reset { .. }))
    {
        return Ok(None);
    }
    let nq = p.qubit_count();
    if nq > opts.max_qubits {
        return Err(SimError::TooManyQubits {
            qubits: nq,
            cap: opts.max_qubits,
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << nq];
    amps[opts.initial_state as usize] = Complex64::new(1.0, 0.0);
    for step in compile(p)? {
        if let Op::Unitary { targets, matrix } = &step.op {
            apply_unitary(&mut amps, targets, matrix);
        }
    }
    Ok(Some(amps))
}
