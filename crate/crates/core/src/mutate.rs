//! First-order mutant generation.
//!
//! Quantum operators edit gates and measurements; classical operators edit
//! the arithmetic inside gate parameters and the constants of classical
//! guards. Every mutant except an initialization insertion changes exactly
//! one statement of the original program.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::{Constant, Instruction, Operand, ParamExpr, Program, Statement};
use crate::gate::Gate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Quantum,
    Classical,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Quantum => "quantum",
            Category::Classical => "classical",
        })
    }
}

/// Variants are declared in code order so the derived `Ord` sorts by code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MutationOperator {
    /// Arithmetic operator replacement inside a parameter expression.
    #[serde(rename = "AOR")]
    Aor,
    /// Constant replacement inside a parameter expression.
    #[serde(rename = "CRP")]
    Crp,
    /// Guard constant replacement.
    #[serde(rename = "GCR")]
    Gcr,
    /// Gate deletion.
    #[serde(rename = "QGD")]
    Qgd,
    /// Gate replacement within the same arity/parameter family.
    #[serde(rename = "QGR")]
    Qgr,
    /// Experimental: prepend a Hadamard on every qubit.
    #[serde(rename = "QIH")]
    Qih,
    /// Measurement deletion.
    #[serde(rename = "QMD")]
    Qmd,
}

impl MutationOperator {
    pub const ALL: [MutationOperator; 7] = [
        MutationOperator::Aor,
        MutationOperator::Crp,
        MutationOperator::Gcr,
        MutationOperator::Qgd,
        MutationOperator::Qgr,
        MutationOperator::Qih,
        MutationOperator::Qmd,
    ];

    pub fn code(self) -> &'static str {
        match self {
            MutationOperator::Aor => "AOR",
            MutationOperator::Crp => "CRP",
            MutationOperator::Gcr => "GCR",
            MutationOperator::Qgd => "QGD",
            MutationOperator::Qgr => "QGR",
            MutationOperator::Qih => "QIH",
            MutationOperator::Qmd => "QMD",
        }
    }

    pub fn category(self) -> Category {
        match self {
            MutationOperator::Aor | MutationOperator::Crp | MutationOperator::Gcr => {
                Category::Classical
            }
            _ => Category::Quantum,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            MutationOperator::Aor => "arithmetic operator replacement in a gate parameter",
            MutationOperator::Crp => "constant replacement in a gate parameter",
            MutationOperator::Gcr => "classical guard constant replacement",
            MutationOperator::Qgd => "quantum gate deletion",
            MutationOperator::Qgr => "quantum gate replacement",
            MutationOperator::Qih => "Hadamard initialization insertion (experimental)",
            MutationOperator::Qmd => "measurement deletion",
        }
    }

    pub fn is_experimental(self) -> bool {
        self == MutationOperator::Qih
    }
}

impl fmt::Display for MutationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorParseError {
    #[error("unknown mutation operator `{0}`")]
    Unknown(String),
    #[error("operator set is empty")]
    Empty,
}

impl FromStr for MutationOperator {
    type Err = OperatorParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let code = s.trim().trim_end_matches('*').to_ascii_uppercase();
        MutationOperator::ALL
            .into_iter()
            .find(|op| op.code() == code)
            .ok_or_else(|| OperatorParseError::Unknown(s.trim().to_string()))
    }
}

/// A nonempty set of operators, parsed from a comma-separated code list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct OperatorSet(BTreeSet<MutationOperator>);

impl OperatorSet {
    pub const DEFAULT_CODES: &'static str = "QGD,QGR,QMD,CRP,AOR,GCR";

    pub fn new(ops: impl IntoIterator<Item = MutationOperator>) -> Result<Self, OperatorParseError> {
        let set: BTreeSet<_> = ops.into_iter().collect();
        if set.is_empty() {
            return Err(OperatorParseError::Empty);
        }
        Ok(OperatorSet(set))
    }

    pub fn contains(&self, op: MutationOperator) -> bool {
        self.0.contains(&op)
    }

    pub fn iter(&self) -> impl Iterator<Item = MutationOperator> + '_ {
        self.0.iter().copied()
    }

    pub fn with(mut self, op: MutationOperator) -> Self {
        self.0.insert(op);
        self
    }

    pub fn without(&self, op: MutationOperator) -> Result<Self, OperatorParseError> {
        OperatorSet::new(self.iter().filter(|o| *o != op))
    }

    /// Number of configured operators in `category`.
    pub fn count(&self, category: Category) -> usize {
        self.iter().filter(|o| o.category() == category).count()
    }
}

impl Default for OperatorSet {
    fn default() -> Self {
        OperatorSet::DEFAULT_CODES.parse().expect("default codes parse")
    }
}

impl FromStr for OperatorSet {
    type Err = OperatorParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let ops = s
            .split(',')
            .filter(|c| !c.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()?;
        OperatorSet::new(ops)
    }
}

impl TryFrom<String> for OperatorSet {
    type Error = OperatorParseError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<OperatorSet> for String {
    fn from(set: OperatorSet) -> String {
        set.to_string()
    }
}

impl fmt::Display for OperatorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<_> = self.iter().map(MutationOperator::code).collect();
        f.write_str(&codes.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mutant {
    /// `<code>-<statement>-<variant>`; initialization mutants use `all`.
    pub id: String,
    pub operator: MutationOperator,
    /// Mutated statement of the original program; `None` for insertions
    /// that belong to no single statement.
    pub target: Option<usize>,
    pub variant: usize,
    /// Human-readable edit, e.g. `h -> x`.
    pub payload: String,
    pub program: Program,
}

impl Mutant {
    fn new(
        operator: MutationOperator,
        target: Option<usize>,
        variant: usize,
        payload: String,
        program: Program,
    ) -> Self {
        let place = target.map_or_else(|| "all".to_string(), |t| t.to_string());
        Mutant {
            id: format!("{}-{place}-{variant}", operator.code()),
            operator,
            target,
            variant,
            payload,
            program,
        }
    }
}

/// Guard constants beyond this many alternatives are not enumerated.
pub const MAX_GUARD_ALTERNATIVES: u64 = 1 << 12;

/// All first-order mutants of `p`, ordered by (statement, operator code,
/// variant) with the statement-less initialization mutant first.
pub fn generate_mutants(p: &Program, ops: &OperatorSet) -> Vec<Mutant> {
    let mut out = Vec::new();
    if ops.contains(MutationOperator::Qih) && p.qubit_count() > 0 {
        out.push(init_hadamard(p));
    }
    for s in &p.statements {
        let mut per_statement: Vec<Mutant> = Vec::new();
        for op in ops.iter() {
            let candidates = match op {
                MutationOperator::Aor => replace_operators(p, s),
                MutationOperator::Crp => replace_constants(p, s),
                MutationOperator::Gcr => replace_guard(p, s),
                MutationOperator::Qgd if s.gate().is_some() => vec![delete(p, s, op)],
                MutationOperator::Qmd if matches!(s.instruction, Instruction::Measure { .. }) => {
                    vec![delete(p, s, op)]
                }
                MutationOperator::Qgr => replace_gate(p, s),
                _ => Vec::new(),
            };
            for (variant, (payload, program)) in candidates.into_iter().enumerate() {
                // drop edits that collapse onto an earlier mutant of this statement
                if program == *p || per_statement.iter().any(|m| m.program == program) {
                    continue;
                }
                per_statement.push(Mutant::new(op, Some(s.id), variant, payload, program));
            }
        }
        out.extend(per_statement);
    }
    out
}

/// `mut(s)`: the mutants targeting statement `s`.
pub fn mut_of(mutants: &[Mutant], s: usize) -> Vec<&Mutant> {
    mutants.iter().filter(|m| m.target == Some(s)).collect()
}

fn with_statement(p: &Program, id: usize, f: impl FnOnce(&mut Statement)) -> Program {
    let mut q = p.clone();
    f(&mut q.statements[id]);
    q
}

fn delete(p: &Program, s: &Statement, op: MutationOperator) -> (String, Program) {
    let mut q = p.clone();
    q.statements.remove(s.id);
    q.renumber();
    let what = match op {
        MutationOperator::Qmd => "measure".to_string(),
        _ => s.gate().map(|g| g.name().to_string()).unwrap_or_default(),
    };
    (format!("delete {what}"), q)
}

fn replace_gate(p: &Program, s: &Statement) -> Vec<(String, Program)> {
    let Some(gate) = s.gate() else {
        return Vec::new();
    };
    gate.family()
        .iter()
        .filter(|g| **g != gate)
        .map(|&g| {
            let q = with_statement(p, s.id, |st| {
                if let Instruction::Gate { gate, .. } = &mut st.instruction {
                    *gate = g;
                }
            });
            (format!("{gate} -> {g}"), q)
        })
        .collect()
}

fn params(s: &Statement) -> &[ParamExpr] {
    match &s.instruction {
        Instruction::Gate { params, .. } => params,
        _ => &[],
    }
}

fn with_param(p: &Program, s: &Statement, index: usize, e: ParamExpr) -> Program {
    with_statement(p, s.id, |st| {
        if let Instruction::Gate { params, .. } = &mut st.instruction {
            params[index] = e;
        }
    })
}

/// Replacements for a constant `c`: {0, 1, -c, c+1} without `c` itself.
fn constant_replacements(c: Constant) -> Vec<ParamExpr> {
    let v = c.value();
    let mut out: Vec<(f64, ParamExpr)> = Vec::new();
    let candidates = match c {
        Constant::Num(_) => [
            ParamExpr::num(0.0),
            ParamExpr::num(1.0),
            ParamExpr::num(-v),
            ParamExpr::num(v + 1.0),
        ],
        Constant::Pi => [
            ParamExpr::num(0.0),
            ParamExpr::num(1.0),
            ParamExpr::neg(ParamExpr::Pi),
            ParamExpr::binary(crate::frontend::BinOp::Add, ParamExpr::Pi, ParamExpr::num(1.0)),
        ],
    };
    for e in candidates {
        let value = e.eval().expect("constant replacement evaluates");
        if value != v && !out.iter().any(|(w, _)| *w == value) {
            out.push((value, e));
        }
    }
    out.into_iter().map(|(_, e)| e).collect()
}

fn replace_constants(p: &Program, s: &Statement) -> Vec<(String, Program)> {
    let mut out = Vec::new();
    for (pi, expr) in params(s).iter().enumerate() {
        for (ci, c) in expr.constants().into_iter().enumerate() {
            for replacement in constant_replacements(c) {
                let mutated = expr.with_constant(ci, &replacement);
                let payload = format!("{expr} -> {mutated}");
                out.push((payload, with_param(p, s, pi, mutated)));
            }
        }
    }
    out
}

fn replace_operators(p: &Program, s: &Statement) -> Vec<(String, Program)> {
    let mut out = Vec::new();
    for (pi, expr) in params(s).iter().enumerate() {
        for (oi, op) in expr.operators().into_iter().enumerate() {
            let mutated = expr.with_operator(oi, op.swapped());
            let payload = format!("{expr} -> {mutated}");
            out.push((payload, with_param(p, s, pi, mutated)));
        }
    }
    out
}

fn replace_guard(p: &Program, s: &Statement) -> Vec<(String, Program)> {
    let Some(guard) = &s.guard else {
        return Vec::new();
    };
    let size = p.register(&guard.register).map_or(0, |r| r.size);
    let limit = if size >= 63 {
        MAX_GUARD_ALTERNATIVES
    } else {
        (1u64 << size).min(MAX_GUARD_ALTERNATIVES)
    };
    (0..limit)
        .filter(|k| *k != guard.value)
        .map(|k| {
            let q = with_statement(p, s.id, |st| {
                if let Some(g) = &mut st.guard {
                    g.value = k;
                }
            });
            (format!("{}=={} -> {}=={k}", guard.register, guard.value, guard.register), q)
        })
        .collect()
}

fn init_hadamard(p: &Program) -> Mutant {
    let mut q = p.clone();
    let layer: Vec<Statement> = p
        .registers
        .iter()
        .filter(|r| r.kind == crate::frontend::RegisterKind::Quantum)
        .flat_map(|r| (0..r.size).map(move |i| Operand::new(r.name.clone(), i)))
        .map(|qubit| Statement {
            id: 0,
            line: 0,
            guard: None,
            instruction: Instruction::Gate {
                gate: Gate::H,
                params: Vec::new(),
                qubits: vec![qubit],
            },
        })
        .collect();
    let n = layer.len();
    q.statements.splice(0..0, layer);
    q.renumber();
    Mutant::new(
        MutationOperator::Qih,
        None,
        0,
        format!("insert h on {n} qubit(s)"),
        q,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    fn ops(codes: &str) -> OperatorSet {
        codes.parse().unwrap()
    }

    #[test]
    fn hadamard_has_eight_replacements() {
        let p = parse("qreg q[1]; h q[0];").unwrap();
        let ms = generate_mutants(&p, &ops("QGR"));
        let targets: Vec<_> = ms.iter().map(|m| m.program.statements[0].gate().unwrap()).collect();
        assert_eq!(
            targets,
            vec![Gate::Id, Gate::X, Gate::Y, Gate::Z, Gate::S, Gate::Sdg, Gate::T, Gate::Tdg]
        );
        assert_eq!(ms[0].id, "QGR-0-0");
        assert_eq!(ms[1].payload, "h -> x");
    }

    #[test]
    fn deletion_targets_only_gates() {
        let p = parse("qreg q[1]; creg c[1]; measure q[0] -> c[0];").unwrap();
        assert!(generate_mutants(&p, &ops("QGD")).is_empty());
        let ms = generate_mutants(&p, &ops("QMD"));
        assert_eq!(ms.len(), 1);
        assert!(ms[0].program.is_empty());
    }

    #[test]
    fn toffoli_mutants() {
        let p = parse("qreg q[3]; ccx q[0],q[1],q[2];").unwrap();
        let ms = generate_mutants(&p, &ops("QGD,QGR"));
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].operator, MutationOperator::Qgd);
        assert_eq!(ms[1].program.statements[0].gate(), Some(Gate::Cswap));
    }

    #[test]
    fn mut_of_counts() {
        let p = parse("qreg q[1]; h q[0];").unwrap();
        let ms = generate_mutants(&p, &ops("QGR,QGD,QIH"));
        assert_eq!(mut_of(&ms, 0).len(), 9);
        assert!(mut_of(&ms, 1).is_empty());
        assert_eq!(ms[0].operator, MutationOperator::Qih);
        assert_eq!(ms[0].target, None);
        assert_eq!(ms.len(), 10);
    }

    #[test]
    fn constant_replacement() {
        let p = parse("qreg q[1]; rx(0.5) q[0];").unwrap();
        let ms = generate_mutants(&p, &ops("CRP"));
        let payloads: Vec<_> = ms.iter().map(|m| m.payload.as_str()).collect();
        assert_eq!(payloads, ["0.5 -> 0", "0.5 -> 1", "0.5 -> -0.5", "0.5 -> 1.5"]);

        // 0 and -0 coincide, and 0+1 equals the replacement 1
        let p = parse("qreg q[1]; rx(0) q[0];").unwrap();
        let payloads: Vec<_> = generate_mutants(&p, &ops("CRP"))
            .into_iter()
            .map(|m| m.payload)
            .collect();
        assert_eq!(payloads, ["0 -> 1"]);

        let p = parse("qreg q[1]; p(pi) q[0];").unwrap();
        let payloads: Vec<_> = generate_mutants(&p, &ops("CRP"))
            .into_iter()
            .map(|m| m.payload)
            .collect();
        assert_eq!(payloads, ["pi -> 0", "pi -> 1", "pi -> -pi", "pi -> pi+1"]);
    }

    #[test]
    fn operator_replacement() {
        let p = parse("qreg q[1]; rz(pi/2+1) q[0];").unwrap();
        let ms = generate_mutants(&p, &ops("AOR"));
        let payloads: Vec<_> = ms.iter().map(|m| m.payload.as_str()).collect();
        assert_eq!(payloads, ["pi/2+1 -> pi/2-1", "pi/2+1 -> pi*2+1"]);
    }

    #[test]
    fn guard_replacement() {
        let p = parse("qreg q[1]; creg c[2]; if (c==1) x q[0];").unwrap();
        let ms = generate_mutants(&p, &ops("GCR"));
        let values: Vec<u64> = ms
            .iter()
            .map(|m| m.program.statements[0].guard.as_ref().unwrap().value)
            .collect();
        assert_eq!(values, vec![0, 2, 3]);
    }

    #[test]
    fn ordering_is_statement_then_code() {
        let p = parse("qreg q[1]; creg c[1]; rx(1) q[0]; measure q[0] -> c[0];").unwrap();
        let ms = generate_mutants(&p, &OperatorSet::default());
        let keys: Vec<(Option<usize>, &str)> =
            ms.iter().map(|m| (m.target, m.operator.code())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(ms.last().unwrap().operator, MutationOperator::Qmd);
    }

    #[test]
    fn initialization_insertion() {
        let p = parse("qreg a[1]; qreg b[2]; cx a[0],b[1];").unwrap();
        let ms = generate_mutants(&p, &ops("QIH"));
        assert_eq!(ms.len(), 1);
        let text = crate::frontend::serialize(&ms[0].program);
        assert_eq!(
            text,
            "qreg a[1];\nqreg b[2];\nh a[0];\nh b[0];\nh b[1];\ncx a[0],b[1];\n"
        );
        assert_eq!(ms[0].id, "QIH-all-0");
    }

    #[test]
    fn operator_set_parsing() {
        let set: OperatorSet = "qgd, QGR ,QIH*".parse().unwrap();
        assert_eq!(set.to_string(), "QGD,QGR,QIH");
        assert_eq!(set.count(Category::Quantum), 3);
        assert!("QGD,XYZ".parse::<OperatorSet>().is_err());
        assert_eq!("".parse::<OperatorSet>(), Err(OperatorParseError::Empty));
        assert_eq!(OperatorSet::default().to_string(), "AOR,CRP,GCR,QGD,QGR,QMD");
    }
}
