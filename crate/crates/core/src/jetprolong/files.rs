//! Line-oriented definition files.
//!
//! Field files hold `xi1 = ...`, `xi2 = ...`, `xi3 = ...`, `eta = ...`;
//! PDE files hold `lhs = ...` and `solve_for = u_rr`. Blank lines and lines
//! starting with `#` are ignored. Missing field coefficients default to 0.

use thiserror::Error;

use super::{JetError, Pde, VectorField};
use crate::symcore::{parse_with, Expr, JetIndex, ParseError, SymbolTable};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("line {line}, column {column}: {source}")]
    Parse {
        line: usize,
        column: usize,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("missing `{0}`")]
    Missing(&'static str),
    #[error(transparent)]
    Jet(#[from] JetError),
}

impl FileError {
    /// Byte offset into the offending expression, when the error came from
    /// the expression parser.
    pub fn offset(&self) -> Option<usize> {
        match self {
            FileError::Parse { source, .. } => Some(source.offset()),
            _ => None,
        }
    }
}

fn entries(text: &str) -> Result<Vec<(usize, String, String, usize)>, FileError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(FileError::Format {
                line: i + 1,
                message: "expected `key = expression`".into(),
            });
        };
        let key = line[..eq].trim().to_string();
        let rhs = &line[eq + 1..];
        let lead = rhs.len() - rhs.trim_start().len();
        out.push((i + 1, key, rhs.trim().to_string(), eq + 1 + lead));
    }
    Ok(out)
}

fn parse_at(
    text: &str,
    line: usize,
    col0: usize,
    table: &SymbolTable,
) -> Result<Expr, FileError> {
    parse_with(text, table).map_err(|source| FileError::Parse {
        line,
        column: col0 + source.offset() + 1,
        source,
    })
}

pub fn parse_field(text: &str, table: &SymbolTable) -> Result<VectorField, FileError> {
    let mut c: [Option<Expr>; 4] = [None, None, None, None];
    for (line, key, rhs, col) in entries(text)? {
        let slot = match key.as_str() {
            "xi1" => 0,
            "xi2" => 1,
            "xi3" => 2,
            "eta" => 3,
            _ => {
                return Err(FileError::Format {
                    line,
                    message: format!("unknown key `{key}` (expected xi1, xi2, xi3 or eta)"),
                })
            }
        };
        if c[slot].is_some() {
            return Err(FileError::Format {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
        c[slot] = Some(parse_at(&rhs, line, col, table)?);
    }
    if c.iter().all(Option::is_none) {
        return Err(FileError::Missing("xi1/xi2/xi3/eta"));
    }
    let [a, b, d, e] = c.map(|x| x.unwrap_or_else(Expr::zero));
    Ok(VectorField::new(a, b, d, e)?)
}

pub fn parse_pde(text: &str, table: &SymbolTable) -> Result<Pde, FileError> {
    let mut lhs = None;
    let mut lead = None;
    for (line, key, rhs, col) in entries(text)? {
        match key.as_str() {
            "lhs" => lhs = Some(parse_at(&rhs, line, col, table)?),
            "solve_for" => {
                let j = rhs
                    .strip_prefix("u_")
                    .and_then(JetIndex::from_letters)
                    .filter(|j| j.order() > 0)
                    .ok_or_else(|| FileError::Format {
                        line,
                        message: format!("`{rhs}` is not a jet coordinate"),
                    })?;
                lead = Some(j);
            }
            _ => {
                return Err(FileError::Format {
                    line,
                    message: format!("unknown key `{key}` (expected lhs or solve_for)"),
                })
            }
        }
    }
    let lhs = lhs.ok_or(FileError::Missing("lhs"))?;
    let lead = lead.ok_or(FileError::Missing("solve_for"))?;
    Ok(Pde::new(lhs, lead)?)
}
