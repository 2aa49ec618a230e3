//! Hand-written lexer and recursive-descent parser.

use super::expr::{BinOp, ParamExpr};
use super::program::{Guard, Instruction, Operand, Program, Register, RegisterKind, Statement};
use super::FrontendError;
use crate::gate::Gate;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number { text: String, integral: bool },
    Str(String),
    Semi,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Arrow,
    EqEq,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number { text, .. } => format!("number `{text}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FrontendError {
    FrontendError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(source: &str) -> Result<Vec<Spanned>, FrontendError> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let push = |tok: Tok, out: &mut Vec<Spanned>| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            })
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            push(Tok::Ident(chars[start..i].iter().collect()), &mut out);
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = i;
            let mut integral = true;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                integral = false;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    integral = false;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            col += i - start;
            let text: String = chars[start..i].iter().collect();
            push(Tok::Number { text, integral }, &mut out);
            continue;
        }
        if c == '"' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                j += 1;
            }
            if chars.get(j) != Some(&'"') {
                return Err(syntax(line, col, "unterminated string literal"));
            }
            col += j + 1 - i;
            i = j + 1;
            push(Tok::Str(chars[start..j].iter().collect()), &mut out);
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, width) = match (c, two.as_str()) {
            (_, "->") => (Tok::Arrow, 2),
            (_, "==") => (Tok::EqEq, 2),
            (';', _) => (Tok::Semi, 1),
            (',', _) => (Tok::Comma, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            _ => return Err(syntax(line, col, format!("unexpected character `{c}`"))),
        };
        i += width;
        col += width;
        push(tok, &mut out);
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    program: Program,
}

pub(super) fn parse_program(source: &str) -> Result<Program, FrontendError> {
    let mut parser = Parser {
        toks: lex(source)?,
        pos: 0,
        program: Program::default(),
    };
    parser.program_body()?;
    Ok(parser.program)
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, what: &str) -> FrontendError {
        let t = self.peek();
        syntax(
            t.line,
            t.column,
            format!("expected {what}, found {}", t.tok.describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<Spanned, FrontendError> {
        if self.peek().tok == tok {
            Ok(self.next())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<(String, Spanned), FrontendError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.next()))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn integer(&mut self) -> Result<u64, FrontendError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Number {
                text,
                integral: true,
            } => {
                let v = text
                    .parse::<u64>()
                    .map_err(|_| syntax(t.line, t.column, format!("integer `{text}` too large")))?;
                self.next();
                Ok(v)
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn program_body(&mut self) -> Result<(), FrontendError> {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == "OPENQASM") {
            self.next();
            let t = self.next();
            if !matches!(t.tok, Tok::Number { .. }) {
                return Err(syntax(t.line, t.column, "expected a version number"));
            }
            self.expect(Tok::Semi)?;
        }
        loop {
            let t = self.peek().clone();
            let word = match &t.tok {
                Tok::Eof => return Ok(()),
                Tok::Ident(w) => w.clone(),
                _ => return Err(self.unexpected("a declaration or statement")),
            };
            match word.as_str() {
                "qreg" | "creg" => {
                    if !self.program.statements.is_empty() {
                        return Err(syntax(
                            t.line,
                            t.column,
                            "register declarations must precede statements",
                        ));
                    }
                    self.declaration()?;
                }
                "include" | "gate" | "opaque" | "U" | "CX" | "OPENQASM" | "for" | "while"
                | "def" => {
                    return Err(FrontendError::UnsupportedConstruct {
                        construct: word,
                        line: t.line,
                    })
                }
                _ => self.statement()?,
            }
        }
    }

    fn declaration(&mut self) -> Result<(), FrontendError> {
        let (kw, t) = self.ident()?;
        let kind = if kw == "qreg" {
            RegisterKind::Quantum
        } else {
            RegisterKind::Classical
        };
        let (name, _) = self.ident()?;
        self.expect(Tok::LBracket)?;
        let size = self.integer()? as usize;
        self.expect(Tok::RBracket)?;
        self.expect(Tok::Semi)?;
        if self.program.register(&name).is_some() {
            return Err(FrontendError::DuplicateRegister { name, line: t.line });
        }
        if name == "pi" {
            return Err(syntax(t.line, t.column, "`pi` is reserved"));
        }
        self.program.registers.push(Register { kind, name, size });
        Ok(())
    }

    fn statement(&mut self) -> Result<(), FrontendError> {
        let line = self.peek().line;
        let guard = if matches!(&self.peek().tok, Tok::Ident(s) if s == "if") {
            self.next();
            self.expect(Tok::LParen)?;
            let (register, _) = self.ident()?;
            self.expect(Tok::EqEq)?;
            let value = self.integer()?;
            self.expect(Tok::RParen)?;
            Some(Guard { register, value })
        } else {
            None
        };
        let (word, t) = self.ident()?;
        let instruction = match word.as_str() {
            "measure" => {
                let qubit = self.operand()?;
                self.expect(Tok::Arrow)?;
                let clbit = self.operand()?;
                Instruction::Measure { qubit, clbit }
            }
            "reset" => Instruction::Reset {
                qubit: self.operand()?,
            },
            "barrier" => {
                let mut qubits = Vec::new();
                loop {
                    qubits.extend(self.barrier_arg()?);
                    if self.peek().tok == Tok::Comma {
                        self.next();
                    } else {
                        break;
                    }
                }
                Instruction::Barrier { qubits }
            }
            "if" => {
                return Err(FrontendError::UnsupportedConstruct {
                    construct: "nested if".into(),
                    line: t.line,
                })
            }
            name => {
                let gate = Gate::from_name(name).ok_or_else(|| FrontendError::UnknownGate {
                    name: name.to_string(),
                    line: t.line,
                })?;
                let mut params = Vec::new();
                if self.peek().tok == Tok::LParen {
                    self.next();
                    loop {
                        params.push(self.expr()?);
                        if self.peek().tok == Tok::Comma {
                            self.next();
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::RParen)?;
                }
                let mut qubits = vec![self.operand()?];
                while self.peek().tok == Tok::Comma {
                    self.next();
                    qubits.push(self.operand()?);
                }
                Instruction::Gate {
                    gate,
                    params,
                    qubits,
                }
            }
        };
        self.expect(Tok::Semi)?;
        let stmt = Statement {
            id: self.program.statements.len(),
            line,
            guard,
            instruction,
        };
        self.program.validate_statement(&stmt)?;
        self.program.statements.push(stmt);
        Ok(())
    }

    fn operand(&mut self) -> Result<Operand, FrontendError> {
        let (register, t) = self.ident()?;
        if self.peek().tok != Tok::LBracket {
            return Err(FrontendError::UnsupportedConstruct {
                construct: format!("whole-register operand `{register}`"),
                line: t.line,
            });
        }
        self.next();
        let index = self.integer()? as usize;
        self.expect(Tok::RBracket)?;
        Ok(Operand { register, index })
    }

    fn barrier_arg(&mut self) -> Result<Vec<Operand>, FrontendError> {
        if let (Tok::Ident(name), Some(next)) = (&self.peek().tok, self.toks.get(self.pos + 1)) {
            if next.tok != Tok::LBracket {
                let name = name.clone();
                let line = self.peek().line;
                self.next();
                let size = match self.program.register(&name) {
                    Some(r) if r.kind == RegisterKind::Quantum => r.size,
                    _ => {
                        return Err(FrontendError::UnknownRegister {
                            name,
                            expected: RegisterKind::Quantum,
                            line,
                        })
                    }
                };
                return Ok((0..size).map(|i| Operand::new(name.clone(), i)).collect());
            }
        }
        Ok(vec![self.operand()?])
    }

    fn expr(&mut self) -> Result<ParamExpr, FrontendError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.term()?;
            lhs = ParamExpr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<ParamExpr, FrontendError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary()?;
            lhs = ParamExpr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<ParamExpr, FrontendError> {
        if self.peek().tok == Tok::Minus {
            self.next();
            if let Tok::Number { .. } = self.peek().tok {
                let v = self.number()?;
                return Ok(ParamExpr::Num(-v));
            }
            return Ok(ParamExpr::neg(self.unary()?));
        }
        self.atom()
    }

    fn number(&mut self) -> Result<f64, FrontendError> {
        let t = self.next();
        match &t.tok {
            Tok::Number { text, .. } => text
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| syntax(t.line, t.column, format!("bad number `{text}`"))),
            _ => unreachable!("caller checked for a number"),
        }
    }

    fn atom(&mut self) -> Result<ParamExpr, FrontendError> {
        match &self.peek().tok {
            Tok::Number { .. } => Ok(ParamExpr::Num(self.number()?)),
            Tok::Ident(s) if s == "pi" => {
                self.next();
                Ok(ParamExpr::Pi)
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected("a number, `pi` or `(`")),
        }
    }
}
