//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := base ('^' exponent)?
//! base   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Exponents must be rational constants. `q` (or `theta`) names the angle.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::expr::{BesselKind, Expr, Func, JetIndex, Rational, UnknownFn, UnknownName};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}; declared symbols: {}", declared.join(", "))]
    UnknownIdentifier {
        name: String,
        offset: usize,
        declared: Vec<String>,
    },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
                *offset
            }
        }
    }
}

/// Names accepted as plain symbols besides r, q (theta), z and the jet
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    constants: BTreeSet<String>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        let mut constants: BTreeSet<String> = (1..=13).map(|i| format!("c{i}")).collect();
        constants.insert("k".to_string());
        SymbolTable { constants }
    }
}

impl SymbolTable {
    pub fn empty() -> Self {
        SymbolTable {
            constants: BTreeSet::new(),
        }
    }

    pub fn with(mut self, names: &[&str]) -> Self {
        self.constants.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        matches!(name, "r" | "q" | "z" | "theta") || self.constants.contains(name)
    }

    pub fn declared(&self) -> Vec<String> {
        let mut out: Vec<String> = ["r", "q", "z", "u"].iter().map(|s| s.to_string()).collect();
        out.extend(self.constants.iter().cloned());
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let t = lx.next()?;
            let done = t.0 == Tok::End;
            out.push(t);
            if done {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if start >= bytes.len() {
            return Ok((Tok::End, start));
        }
        let c = bytes[start];
        if c.is_ascii_digit() || c == b'.' {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let int_part = &self.src[start..self.pos];
            let mut value = if int_part.is_empty() {
                Rational::zero()
            } else {
                Rational::from_integer(int_part.parse::<BigInt>().unwrap())
            };
            if self.pos < bytes.len() && bytes[self.pos] == b'.' {
                self.pos += 1;
                let fs = self.pos;
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let frac = &self.src[fs..self.pos];
                if frac.is_empty() && int_part.is_empty() {
                    return Err(ParseError::Syntax {
                        offset: start,
                        message: "malformed number".into(),
                    });
                }
                if !frac.is_empty() {
                    let num: BigInt = frac.parse().unwrap();
                    let den = num_traits::pow::Pow::pow(BigInt::from(10), frac.len());
                    value += Rational::new(num, den);
                }
            }
            return Ok((Tok::Num(value), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < bytes.len()
                && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        if b"+-*/^(),".contains(&c) {
            self.pos += 1;
            return Ok((Tok::Op(c as char), start));
        }
        Err(ParseError::Syntax {
            offset: start,
            message: format!("unexpected character `{}`", self.src[start..].chars().next().unwrap()),
        })
    }
}

struct Parser<'t> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    table: &'t SymbolTable,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            message: format!("expected {wanted}, found {}", describe(self.peek())),
        }
    }

    fn expect_op(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    terms.push(-self.term()?);
                }
                _ => return Ok(Expr::add(terms)),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = acc * self.unary()?;
                }
                Tok::Op('/') => {
                    self.bump();
                    acc = acc / self.unary()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let e = self.exponent()?;
            return Ok(Expr::pow(base, e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Rational, ParseError> {
        let at = self.offset();
        let value = match self.peek().clone() {
            Tok::Op('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_op(')')?;
                e
            }
            Tok::Op('-') => {
                self.bump();
                match self.bump() {
                    Tok::Num(n) => Expr::rational(-n),
                    _ => {
                        return Err(ParseError::Syntax {
                            offset: at,
                            message: "expected a number after `^-`".into(),
                        })
                    }
                }
            }
            Tok::Num(n) => {
                self.bump();
                Expr::rational(n)
            }
            _ => return Err(self.unexpected("an exponent")),
        };
        value.as_rational().cloned().ok_or(ParseError::Syntax {
            offset: at,
            message: "exponent must be a rational constant".into(),
        })
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect_op('(')?;
        let mut out = vec![self.expr()?];
        while *self.peek() == Tok::Op(',') {
            self.bump();
            out.push(self.expr()?);
        }
        self.expect_op(')')?;
        Ok(out)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::rational(n))
            }
            Tok::Op('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::Op('(') {
                    return self.call(&name, at);
                }
                self.ident(&name, at)
            }
            _ => Err(self.unexpected("an operand")),
        }
    }

    fn call(&mut self, name: &str, at: usize) -> Result<Expr, ParseError> {
        let arity = |args: &Vec<Expr>, n: usize| -> Result<(), ParseError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(ParseError::Syntax {
                    offset: at,
                    message: format!("`{name}` takes {n} argument(s), got {}", args.len()),
                })
            }
        };
        if let Some(u) = UnknownName::from_name(name) {
            // xi1(r, q, z, u): the argument list is fixed, accept and drop it
            let args = self.args()?;
            arity(&args, 4)?;
            return Ok(Expr::unknown(UnknownFn::new(u)));
        }
        let unary = match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "ln" | "log" => Some(Func::Ln),
            "arctan" | "atan" => Some(Func::Arctan),
            _ => None,
        };
        if let Some(k) = unary {
            let args = self.args()?;
            arity(&args, 1)?;
            return Ok(Expr::func(k, args[0].clone()));
        }
        match name {
            "tan" => {
                let args = self.args()?;
                arity(&args, 1)?;
                Ok(args[0].tan())
            }
            "sqrt" => {
                let args = self.args()?;
                arity(&args, 1)?;
                Ok(args[0].sqrt())
            }
            "BesselJ" | "BJ" | "BesselY" | "BY" => {
                let args = self.args()?;
                arity(&args, 2)?;
                let kind = if name.ends_with('J') {
                    BesselKind::J
                } else {
                    BesselKind::Y
                };
                Ok(Expr::bessel(kind, args[0].clone(), args[1].clone()))
            }
            _ => Err(ParseError::UnknownIdentifier {
                name: name.to_string(),
                offset: at,
                declared: self.table.declared(),
            }),
        }
    }

    fn ident(&self, name: &str, at: usize) -> Result<Expr, ParseError> {
        if name == "u" {
            return Ok(Expr::u());
        }
        if let Some(sub) = name.strip_prefix("u_") {
            if let Some(j) = JetIndex::from_letters(sub) {
                if j.order() > 0 {
                    return Ok(Expr::jet(j));
                }
            }
        }
        let (head, sub) = match name.split_once('_') {
            Some((h, s)) => (h, Some(s)),
            None => (name, None),
        };
        if let Some(u) = UnknownName::from_name(head) {
            let f = match sub {
                None => Some(UnknownFn::new(u)),
                Some(s) if !s.is_empty() => UnknownFn::from_letters(u, s),
                _ => None,
            };
            if let Some(f) = f {
                return Ok(Expr::unknown(f));
            }
        }
        if name == "theta" {
            return Ok(Expr::sym("q"));
        }
        if self.table.contains(name) {
            return Ok(Expr::sym(name));
        }
        Err(ParseError::UnknownIdentifier {
            name: name.to_string(),
            offset: at,
            declared: self.table.declared(),
        })
    }
}

/// Parses with the default symbol table (`k`, `c1`..`c13`).
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, &SymbolTable::default())
}

pub fn parse_with(text: &str, table: &SymbolTable) -> Result<Expr, ParseError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, i: 0, table };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

/// Parses a signed rational literal such as `-3/2` or `0.25`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let e = parse_with(text, &SymbolTable::empty()).ok()?;
    e.as_rational().cloned()
}
