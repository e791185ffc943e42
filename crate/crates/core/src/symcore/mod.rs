//! Exact symbolic expressions over the jet space of one dependent variable.

mod calculus;
mod expr;
mod parse;
mod print;

pub use calculus::{differentiate, simplify, substitute, substitute_one, substitute_unknowns, SymError};
pub use expr::{int, rat, BesselKind, Coord, Expr, Func, JetIndex, Node, Rational, UnknownFn, UnknownName, Var};
pub use parse::{parse, parse_rational, parse_with, ParseError, SymbolTable};

#[cfg(test)]
mod tests;
