//! Arithmetic formulas over the atom index `n`.
//!
//! Grammar (`^` is right-associative, unary minus binds tighter than `^`):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := unary ('^' factor)?
//! unary  := '-' unary | atom
//! atom   := literal | 'n' | func '(' expr (',' expr)? ')' | '(' expr ')'
//! func   := ln | exp | min | max | floor | abs
//! ```
//!
//! Literals are nonnegative decimals with an optional exponent (`0.5`,
//! `1e-3`). [`ModelExpr`]'s `Display` prints a fully parenthesized form
//! that parses back to the identical tree.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Ln,
    Exp,
    Min,
    Max,
    Floor,
    Abs,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Ln,
        Func::Exp,
        Func::Min,
        Func::Max,
        Func::Floor,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Min => "min",
            Func::Max => "max",
            Func::Floor => "floor",
            Func::Abs => "abs",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Parsed formula.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelExpr {
    Literal(f64),
    /// The atom index `n`.
    Index,
    Neg(Box<ModelExpr>),
    Binary(BinOp, Box<ModelExpr>, Box<ModelExpr>),
    Call(Func, Vec<ModelExpr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown function `{name}` at offset {pos}")]
    UnknownFunction { pos: usize, name: String },
    #[error("`{name}` at offset {pos} takes {expected} argument(s), got {found}")]
    Arity {
        pos: usize,
        name: String,
        expected: usize,
        found: usize,
    },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownFunction { pos, .. }
            | ParseError::Arity { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("division by zero")]
    DivByZero,
    #[error("overflow: {0}")]
    Overflow(String),
}

impl ModelExpr {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse_expr(text)
    }

    pub fn literal(v: f64) -> Self {
        ModelExpr::Literal(v)
    }

    pub fn index() -> Self {
        ModelExpr::Index
    }

    pub fn is_index(&self) -> bool {
        matches!(self, ModelExpr::Index)
    }

    /// Evaluate at atom index `n`.
    pub fn eval(&self, n: u64) -> Result<f64, EvalError> {
        eval_expr(self, n)
    }

    /// Evaluate, treating the formula as a constant (`n = 0`).
    pub fn eval_const(&self) -> Result<f64, EvalError> {
        eval_expr(self, 0)
    }
}

impl FromStr for ModelExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

impl fmt::Display for ModelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelExpr::Literal(v) => f.write_str(&crate::fmt::shortest(*v)),
            ModelExpr::Index => f.write_str("n"),
            ModelExpr::Neg(e) => write!(f, "(-{e})"),
            ModelExpr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            ModelExpr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let s = &text[start..i];
                let v: f64 = s
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| ParseError::Syntax {
                        pos: start,
                        message: format!("malformed number `{s}`"),
                    })?;
                out.push((start, Tok::Num(v)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_owned())));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((i, Tok::Op(c as char)));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b',' => {
                out.push((i, Tok::Comma));
                i += 1;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    pos: i,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.at += 1;
            Ok(())
        } else {
            self.syntax(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<ModelExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Op('+')) => BinOp::Add,
                Some(Tok::Op('-')) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.at += 1;
            let rhs = self.term()?;
            lhs = ModelExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<ModelExpr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Op('*')) => BinOp::Mul,
                Some(Tok::Op('/')) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.at += 1;
            let rhs = self.factor()?;
            lhs = ModelExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<ModelExpr, ParseError> {
        let base = self.unary()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.at += 1;
            let exponent = self.factor()?;
            return Ok(ModelExpr::Binary(
                BinOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<ModelExpr, ParseError> {
        if self.peek() == Some(&Tok::Op('-')) {
            self.at += 1;
            return Ok(ModelExpr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ModelExpr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(ModelExpr::Literal(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    let func = Func::from_name(&name)
                        .ok_or(ParseError::UnknownFunction { pos, name: name.clone() })?;
                    self.at += 1;
                    let mut args = vec![self.expr()?];
                    if self.peek() == Some(&Tok::Comma) {
                        self.at += 1;
                        args.push(self.expr()?);
                    }
                    if self.peek() == Some(&Tok::Comma) {
                        // a third argument is never valid; report it as arity
                        let mut found = args.len();
                        while self.peek() == Some(&Tok::Comma) {
                            self.at += 1;
                            self.expr()?;
                            found += 1;
                        }
                        return Err(ParseError::Arity {
                            pos,
                            name,
                            expected: func.arity(),
                            found,
                        });
                    }
                    self.expect(Tok::RParen, "`)` or `,`")?;
                    if args.len() != func.arity() {
                        return Err(ParseError::Arity {
                            pos,
                            name,
                            expected: func.arity(),
                            found: args.len(),
                        });
                    }
                    Ok(ModelExpr::Call(func, args))
                } else if name == "n" {
                    Ok(ModelExpr::Index)
                } else {
                    Err(ParseError::Syntax {
                        pos,
                        message: format!("unknown variable `{name}` (only `n` is defined)"),
                    })
                }
            }
            Some(Tok::Op(c)) => Err(ParseError::Syntax {
                pos,
                message: format!("unexpected operator `{c}`"),
            }),
            Some(Tok::RParen) => Err(ParseError::Syntax {
                pos,
                message: "unexpected `)`".into(),
            }),
            Some(Tok::Comma) => Err(ParseError::Syntax {
                pos,
                message: "unexpected `,`".into(),
            }),
            None => Err(ParseError::Syntax {
                pos,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parse `text` under the grammar in the module docs.
pub fn parse_expr(text: &str) -> Result<ModelExpr, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError::Syntax {
            pos: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.at < p.toks.len() {
        return p.syntax("unexpected trailing input");
    }
    Ok(e)
}

fn finite(v: f64, what: &str) -> Result<f64, EvalError> {
    if v.is_nan() {
        Err(EvalError::Domain(format!("{what} is undefined")))
    } else if v.is_infinite() {
        Err(EvalError::Overflow(format!("{what} is not finite")))
    } else {
        Ok(v)
    }
}

/// Evaluate `e` at index `n` in parse-tree order.
pub fn eval_expr(e: &ModelExpr, n: u64) -> Result<f64, EvalError> {
    match e {
        ModelExpr::Literal(v) => Ok(*v),
        ModelExpr::Index => Ok(n as f64),
        ModelExpr::Neg(x) => Ok(-eval_expr(x, n)?),
        ModelExpr::Binary(op, l, r) => {
            let a = eval_expr(l, n)?;
            let b = eval_expr(r, n)?;
            match op {
                BinOp::Add => finite(a + b, "sum"),
                BinOp::Sub => finite(a - b, "difference"),
                BinOp::Mul => finite(a * b, "product"),
                BinOp::Div => {
                    if b == 0.0 {
                        Err(EvalError::DivByZero)
                    } else {
                        finite(a / b, "quotient")
                    }
                }
                BinOp::Pow => {
                    if a == 0.0 && b < 0.0 {
                        return Err(EvalError::DivByZero);
                    }
                    finite(a.powf(b), &format!("{a}^{b}"))
                }
            }
        }
        ModelExpr::Call(func, args) => {
            let x = eval_expr(&args[0], n)?;
            match func {
                Func::Ln => {
                    if x <= 0.0 {
                        Err(EvalError::Domain(format!("ln({x})")))
                    } else {
                        Ok(x.ln())
                    }
                }
                Func::Exp => finite(x.exp(), &format!("exp({x})")),
                Func::Floor => Ok(x.floor()),
                Func::Abs => Ok(x.abs()),
                Func::Min => Ok(x.min(eval_expr(&args[1], n)?)),
                Func::Max => Ok(x.max(eval_expr(&args[1], n)?)),
            }
        }
    }
}
