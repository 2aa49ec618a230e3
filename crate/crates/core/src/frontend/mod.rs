//! Circuit-language frontend: parsing, canonical serialization and
//! ground-truth diffing.
//!
//! The language is a strict OpenQASM-2 subset without includes or
//! user-defined gates, so every statement sits on its own source line and
//! statement ids are simply source order.

mod diff;
mod expr;
mod parser;
mod program;

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

pub use diff::diff_ground_truth;
pub use expr::{BinOp, Constant, EvalError, ParamExpr};
pub use program::{
    Guard, Instruction, Operand, Program, Register, RegisterKind, Statement, StatementKind,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrontendError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unknown gate `{name}`")]
    UnknownGate { name: String, line: usize },
    #[error("line {line}: {register}[{index}] is out of range (size {size})")]
    OperandOutOfRange {
        register: String,
        index: u64,
        size: u64,
        line: usize,
    },
    #[error("line {line}: qubit operand {operand} is repeated")]
    DuplicateQubitOperand { operand: String, line: usize },
    #[error("line {line}: unsupported construct: {construct}")]
    UnsupportedConstruct { construct: String, line: usize },
    #[error("line {line}: unknown {} register `{name}`", expected.keyword())]
    UnknownRegister {
        name: String,
        expected: RegisterKind,
        line: usize,
    },
    #[error("line {line}: register `{name}` declared twice")]
    DuplicateRegister { name: String, line: usize },
    #[error(
        "line {line}: `{gate}` takes {} qubit(s) and {} parameter(s), found {} and {}",
        expected.0, expected.1, found.0, found.1
    )]
    ArityMismatch {
        gate: String,
        expected: (usize, usize),
        found: (usize, usize),
        line: usize,
    },
    #[error("invalid program: {0}")]
    Invalid(String),
    #[error("programs are identical; no faulty statement can be derived")]
    EmptyDiff,
    #[error("buggy program has no statements to blame")]
    NoStatements,
}

impl FrontendError {
    /// Source line the error points at, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            FrontendError::Syntax { line, .. }
            | FrontendError::UnknownGate { line, .. }
            | FrontendError::OperandOutOfRange { line, .. }
            | FrontendError::DuplicateQubitOperand { line, .. }
            | FrontendError::UnsupportedConstruct { line, .. }
            | FrontendError::UnknownRegister { line, .. }
            | FrontendError::DuplicateRegister { line, .. }
            | FrontendError::ArityMismatch { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Parse source text into a validated program.
pub fn parse(source: &str) -> Result<Program, FrontendError> {
    parser::parse_program(source)
}

/// Read and parse a file, remembering its path.
pub fn parse_file(path: &Path) -> std::io::Result<Result<Program, FrontendError>> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse(&text).map(|mut p| {
        p.source_path = Some(path.to_path_buf());
        p
    }))
}

/// Canonical text of a single statement (no trailing newline).
pub fn serialize_statement(s: &Statement) -> String {
    let mut out = String::new();
    if let Some(g) = &s.guard {
        let _ = write!(out, "if ({}=={}) ", g.register, g.value);
    }
    match &s.instruction {
        Instruction::Gate {
            gate,
            params,
            qubits,
        } => {
            out.push_str(gate.name());
            if !params.is_empty() {
                let ps: Vec<String> = params.iter().map(ToString::to_string).collect();
                let _ = write!(out, "({})", ps.join(","));
            }
            out.push(' ');
            out.push_str(&join_operands(qubits));
        }
        Instruction::Measure { qubit, clbit } => {
            let _ = write!(out, "measure {qubit} -> {clbit}");
        }
        Instruction::Barrier { qubits } => {
            let _ = write!(out, "barrier {}", join_operands(qubits));
        }
        Instruction::Reset { qubit } => {
            let _ = write!(out, "reset {qubit}");
        }
    }
    out.push(';');
    out
}

fn join_operands(ops: &[Operand]) -> String {
    ops.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Canonical program text: declarations in order, one statement per line.
pub fn serialize(p: &Program) -> String {
    let mut out = String::new();
    for r in &p.registers {
        let _ = writeln!(out, "{} {}[{}];", r.kind.keyword(), r.name, r.size);
    }
    for s in &p.statements {
        out.push_str(&serialize_statement(s));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::Gate;

    #[test]
    fn smallest_program() {
        let p = parse("qreg q[1]; h q[0];").unwrap();
        assert_eq!(p.qubit_count(), 1);
        assert_eq!(p.clbit_count(), 0);
        assert_eq!(p.len(), 1);
        assert_eq!(p.statements[0].gate(), Some(Gate::H));
        assert_eq!(p.statements[0].id, 0);
        assert_eq!(serialize(&p), "qreg q[1];\nh q[0];\n");
    }

    #[test]
    fn toffoli_program() {
        let p = parse("qreg q[3]; ccx q[0],q[1],q[2];").unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.statements[0].gate(), Some(Gate::Ccx));
        assert_eq!(p.statements[0].instruction.qubits().len(), 3);
    }

    #[test]
    fn out_of_range_operand() {
        let err = parse("qreg q[1]; h q[5];").unwrap_err();
        assert!(matches!(err, FrontendError::OperandOutOfRange { index: 5, .. }), "{err}");
    }

    #[test]
    fn rejects_bad_programs() {
        let cases = [
            ("qreg q[2]; foo q[0];", "unknown gate"),
            ("qreg q[2]; cx q[0],q[0];", "repeated"),
            ("include \"qelib1.inc\";", "unsupported"),
            ("qreg q[2]; h q;", "unsupported"),
            ("qreg q[2]; h q[0]\n", "syntax"),
            ("qreg q[2]; rx q[0];", "parameter"),
            ("qreg q[2]; h q[0],q[1];", "parameter"),
            ("qreg q[1]; creg c[1]; if (c==2) x q[0];", "out of range"),
            ("qreg q[1]; h q[0]; creg c[1];", "precede"),
            ("qreg q[1]; measure q[0] -> d[0];", "unknown creg"),
            ("qreg q[1]; qreg q[2];", "declared twice"),
        ];
        for (src, needle) in cases {
            let err = parse(src).unwrap_err().to_string();
            assert!(err.contains(needle), "{src}: {err}");
        }
    }

    #[test]
    fn syntax_error_position() {
        let err = parse("qreg q[1];\n\nh q[0] ;\nx q[0)").unwrap_err();
        assert_eq!(
            err,
            FrontendError::Syntax {
                line: 4,
                column: 6,
                message: "expected `]`, found `)`".into()
            }
        );
    }

    #[test]
    fn canonical_forms() {
        let p = parse("qreg q[1];\ncreg c[1];\nrx( pi / 2 ) q[0]; if(c == 1) x q[0];").unwrap();
        let text = serialize(&p);
        assert!(text.contains("rx(pi/2) q[0];\n"), "{text}");
        assert!(text.contains("if (c==1) x q[0];\n"), "{text}");
        assert_eq!(parse(&text).unwrap(), p);
    }

    #[test]
    fn comments_and_blank_lines_do_not_shift_ids() {
        let a = parse("qreg q[2];\nh q[0];\ncx q[0],q[1];").unwrap();
        let b = parse("// bell\nqreg q[2];\n\n  h q[0]; // first\n\n\ncx q[0],q[1];\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(b.statements[1].id, 1);
        assert_eq!(b.statements[1].line, 7);
    }

    #[test]
    fn header_and_barrier_register_form() {
        let p = parse("OPENQASM 2.0;\nqreg q[3];\nbarrier q;\nreset q[1];").unwrap();
        assert_eq!(p.statements[0].instruction.qubits().len(), 3);
        assert_eq!(serialize(&p), "qreg q[3];\nbarrier q[0],q[1],q[2];\nreset q[1];\n");
    }

    #[test]
    fn negative_literals_fold() {
        let p = parse("qreg q[1]; p(-1.5*pi) q[0]; rz(-pi) q[0]; ry(-(2)) q[0];").unwrap();
        let text = serialize(&p);
        assert!(text.contains("p(-1.5*pi)"), "{text}");
        assert!(text.contains("rz(-pi)"), "{text}");
        assert!(text.contains("ry(-(2))"), "{text}");
        assert_eq!(parse(&text).unwrap(), p);
    }

    #[test]
    fn multiple_registers_flatten_in_order() {
        let p = parse("qreg a[2]; qreg b[3]; creg c[1]; creg d[2]; measure b[1] -> d[1];")
            .unwrap();
        assert_eq!(p.qubit_count(), 5);
        assert_eq!(p.clbit_count(), 3);
        assert_eq!(p.flat_index(&Operand::new("b", 1)), 3);
        assert_eq!(p.flat_index(&Operand::new("d", 1)), 2);
    }
}
