//! Program representation shared by every downstream module.

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::expr::ParamExpr;
use super::FrontendError;
use crate::gate::Gate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegisterKind {
    Quantum,
    Classical,
}

impl RegisterKind {
    pub fn keyword(self) -> &'static str {
        match self {
            RegisterKind::Quantum => "qreg",
            RegisterKind::Classical => "creg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub kind: RegisterKind,
    pub name: String,
    pub size: usize,
}

/// `reg[index]`
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Operand {
    pub register: String,
    pub index: usize,
}

impl Operand {
    pub fn new(register: impl Into<String>, index: usize) -> Self {
        Operand {
            register: register.into(),
            index,
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.register, self.index)
    }
}

/// `if (reg==value)`; compares the register read as an unsigned integer
/// with `reg[0]` as the least significant bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guard {
    pub register: String,
    pub value: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatementKind {
    GateApp,
    Measure,
    Barrier,
    Reset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Instruction {
    Gate {
        gate: Gate,
        params: Vec<ParamExpr>,
        qubits: Vec<Operand>,
    },
    Measure {
        qubit: Operand,
        clbit: Operand,
    },
    Barrier {
        qubits: Vec<Operand>,
    },
    Reset {
        qubit: Operand,
    },
}

impl Instruction {
    pub fn kind(&self) -> StatementKind {
        match self {
            Instruction::Gate { .. } => StatementKind::GateApp,
            Instruction::Measure { .. } => StatementKind::Measure,
            Instruction::Barrier { .. } => StatementKind::Barrier,
            Instruction::Reset { .. } => StatementKind::Reset,
        }
    }

    pub fn qubits(&self) -> &[Operand] {
        match self {
            Instruction::Gate { qubits, .. } | Instruction::Barrier { qubits } => qubits,
            Instruction::Measure { qubit, .. } | Instruction::Reset { qubit } => {
                std::slice::from_ref(qubit)
            }
        }
    }
}

/// One executable statement. Equality ignores `line`, so reformatting a
/// program does not change its structure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Statement {
    pub id: usize,
    pub line: usize,
    pub guard: Option<Guard>,
    pub instruction: Instruction,
}

impl PartialEq for Statement {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.guard == other.guard && self.instruction == other.instruction
    }
}

impl Statement {
    pub fn kind(&self) -> StatementKind {
        self.instruction.kind()
    }

    pub fn gate(&self) -> Option<Gate> {
        match &self.instruction {
            Instruction::Gate { gate, .. } => Some(*gate),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Program {
    pub registers: Vec<Register>,
    pub statements: Vec<Statement>,
    pub source_path: Option<PathBuf>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.registers == other.registers && self.statements == other.statements
    }
}

impl Program {
    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    fn count(&self, kind: RegisterKind) -> usize {
        self.registers
            .iter()
            .filter(|r| r.kind == kind)
            .map(|r| r.size)
            .sum()
    }

    pub fn qubit_count(&self) -> usize {
        self.count(RegisterKind::Quantum)
    }

    pub fn clbit_count(&self) -> usize {
        self.count(RegisterKind::Classical)
    }

    /// Offset of the first bit of register `name` in the flat qubit or clbit
    /// numbering (registers laid out in declaration order).
    pub fn register_offset(&self, name: &str) -> Option<usize> {
        let reg = self.register(name)?;
        Some(
            self.registers
                .iter()
                .take_while(|r| r.name != name)
                .filter(|r| r.kind == reg.kind)
                .map(|r| r.size)
                .sum(),
        )
    }

    /// Flat index of an operand, assuming the program validated.
    pub fn flat_index(&self, op: &Operand) -> usize {
        self.register_offset(&op.register)
            .expect("operand refers to a declared register")
            + op.index
    }

    /// Renumber statement ids to `0..N` in order.
    pub fn renumber(&mut self) {
        for (i, s) in self.statements.iter_mut().enumerate() {
            s.id = i;
        }
    }

    /// Checks every structural invariant the parser enforces.
    pub fn validate(&self) -> Result<(), FrontendError> {
        let mut names = HashSet::new();
        for r in &self.registers {
            if !names.insert(r.name.as_str()) {
                return Err(FrontendError::DuplicateRegister {
                    name: r.name.clone(),
                    line: 0,
                });
            }
        }
        for (i, s) in self.statements.iter().enumerate() {
            if s.id != i {
                return Err(FrontendError::Invalid(format!(
                    "statement ids out of order: position {i} has id {}",
                    s.id
                )));
            }
            self.validate_statement(s)?;
        }
        Ok(())
    }

    pub(crate) fn validate_statement(&self, s: &Statement) -> Result<(), FrontendError> {
        let line = s.line;
        if let Some(g) = &s.guard {
            let reg = self.check_register(&g.register, RegisterKind::Classical, line)?;
            if reg.size < 64 && g.value >= (1u64 << reg.size) {
                return Err(FrontendError::OperandOutOfRange {
                    register: g.register.clone(),
                    index: g.value,
                    size: 1u64 << reg.size,
                    line,
                });
            }
        }
        if let Instruction::Gate { gate, params, qubits } = &s.instruction {
            if qubits.len() != gate.arity() || params.len() != gate.param_count() {
                return Err(FrontendError::ArityMismatch {
                    gate: gate.name().to_string(),
                    expected: (gate.arity(), gate.param_count()),
                    found: (qubits.len(), params.len()),
                    line,
                });
            }
        }
        let mut seen = HashSet::new();
        for q in s.instruction.qubits() {
            self.check_operand(q, RegisterKind::Quantum, line)?;
            if !seen.insert(q) {
                return Err(FrontendError::DuplicateQubitOperand {
                    operand: q.to_string(),
                    line,
                });
            }
        }
        if let Instruction::Measure { clbit, .. } = &s.instruction {
            self.check_operand(clbit, RegisterKind::Classical, line)?;
        }
        Ok(())
    }

    fn check_register(
        &self,
        name: &str,
        kind: RegisterKind,
        line: usize,
    ) -> Result<&Register, FrontendError> {
        match self.register(name) {
            Some(r) if r.kind == kind => Ok(r),
            _ => Err(FrontendError::UnknownRegister {
                name: name.to_string(),
                expected: kind,
                line,
            }),
        }
    }

    fn check_operand(
        &self,
        op: &Operand,
        kind: RegisterKind,
        line: usize,
    ) -> Result<(), FrontendError> {
        let reg = self.check_register(&op.register, kind, line)?;
        if op.index >= reg.size {
            return Err(FrontendError::OperandOutOfRange {
                register: op.register.clone(),
                index: op.index as u64,
                size: reg.size as u64,
                line,
            });
        }
        Ok(())
    }
}
