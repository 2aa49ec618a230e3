//! Gate parameter expressions.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    /// The arithmetic-operator-replacement partner: `+`/`-` and `*`/`/`.
    pub fn swapped(self) -> BinOp {
        match self {
            BinOp::Add => BinOp::Sub,
            BinOp::Sub => BinOp::Add,
            BinOp::Mul => BinOp::Div,
            BinOp::Div => BinOp::Mul,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
}

/// An angle expression. Negative literals only arise from a unary minus
/// written directly before a number, which the parser folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ParamExpr {
    Num(f64),
    Pi,
    Neg(Box<ParamExpr>),
    Binary(BinOp, Box<ParamExpr>, Box<ParamExpr>),
}

/// A leaf constant, addressed by its pre-order position in the tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constant {
    Num(f64),
    Pi,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Num(v) => v,
            Constant::Pi => PI,
        }
    }
}

impl ParamExpr {
    pub fn num(v: f64) -> Self {
        ParamExpr::Num(v)
    }

    pub fn binary(op: BinOp, lhs: ParamExpr, rhs: ParamExpr) -> Self {
        ParamExpr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn neg(inner: ParamExpr) -> Self {
        ParamExpr::Neg(Box::new(inner))
    }

    pub fn eval(&self) -> Result<f64, EvalError> {
        Ok(match self {
            ParamExpr::Num(v) => *v,
            ParamExpr::Pi => PI,
            ParamExpr::Neg(e) => -e.eval()?,
            ParamExpr::Binary(op, l, r) => {
                let (a, b) = (l.eval()?, r.eval()?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                }
            }
        })
    }

    /// Leaf constants in pre-order.
    pub fn constants(&self) -> Vec<Constant> {
        let mut out = Vec::new();
        self.visit(&mut |e| match e {
            ParamExpr::Num(v) => out.push(Constant::Num(*v)),
            ParamExpr::Pi => out.push(Constant::Pi),
            _ => {}
        });
        out
    }

    /// Binary operators in pre-order.
    pub fn operators(&self) -> Vec<BinOp> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let ParamExpr::Binary(op, _, _) = e {
                out.push(*op);
            }
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a ParamExpr)) {
        f(self);
        match self {
            ParamExpr::Neg(e) => e.visit(f),
            ParamExpr::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
            _ => {}
        }
    }

    /// Copy of `self` with the `index`-th leaf constant replaced.
    pub fn with_constant(&self, index: usize, replacement: &ParamExpr) -> ParamExpr {
        let mut counter = 0;
        self.rebuild(&mut |e| match e {
            ParamExpr::Num(_) | ParamExpr::Pi => {
                let hit = counter == index;
                counter += 1;
                hit.then(|| replacement.clone())
            }
            _ => None,
        })
    }

    /// Copy of `self` with the `index`-th binary operator replaced by `op`.
    pub fn with_operator(&self, index: usize, op: BinOp) -> ParamExpr {
        let mut counter = 0;
        self.rebuild(&mut |e| match e {
            ParamExpr::Binary(_, l, r) => {
                let hit = counter == index;
                counter += 1;
                hit.then(|| ParamExpr::Binary(op, l.clone(), r.clone()))
            }
            _ => None,
        })
    }

    // Pre-order rebuild; a `Some` from `f` replaces the node and its subtree.
    fn rebuild(&self, f: &mut impl FnMut(&ParamExpr) -> Option<ParamExpr>) -> ParamExpr {
        if let Some(replaced) = f(self) {
            // keep the pre-order counter in step with the skipped subtree
            match self {
                ParamExpr::Binary(_, l, r) => {
                    l.rebuild(f);
                    r.rebuild(f);
                }
                ParamExpr::Neg(e) => {
                    e.rebuild(f);
                }
                _ => {}
            }
            return replaced;
        }
        match self {
            ParamExpr::Num(_) | ParamExpr::Pi => self.clone(),
            ParamExpr::Neg(e) => ParamExpr::neg(e.rebuild(f)),
            ParamExpr::Binary(op, l, r) => ParamExpr::binary(*op, l.rebuild(f), r.rebuild(f)),
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, parent: BinOp, right: bool) -> fmt::Result {
        let wrap = match self {
            ParamExpr::Binary(op, _, _) => {
                op.precedence() < parent.precedence()
                    || (right && op.precedence() == parent.precedence())
            }
            ParamExpr::Num(v) => right && v.is_sign_negative(),
            _ => false,
        };
        if wrap {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamExpr::Num(v) => write!(f, "{v}"),
            ParamExpr::Pi => f.write_str("pi"),
            ParamExpr::Neg(inner) => match inner.as_ref() {
                ParamExpr::Pi => f.write_str("-pi"),
                other => write!(f, "-({other})"),
            },
            ParamExpr::Binary(op, l, r) => {
                l.write_operand(f, *op, false)?;
                write!(f, "{}", op.symbol())?;
                r.write_operand(f, *op, true)
            }
        }
    }
}
