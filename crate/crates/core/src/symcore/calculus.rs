//! Formal differentiation, substitution and simplification.

use std::collections::BTreeMap;

use thiserror::Error;

use super::expr::{int, rat, Expr, Func, JetIndex, Node, UnknownFn, Var};
use super::parse::SymbolTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("`{0}` is not a declared variable")]
    Undeclared(String),
    #[error("cannot differentiate {kind} with respect to its order variable `{var}`")]
    OrderDependsOnVariable { kind: &'static str, var: String },
}

impl Var {
    /// Resolves a variable name: `u`, a jet coordinate `u_rq`, `theta`, or a
    /// symbol from the table.
    pub fn resolve(name: &str, table: &SymbolTable) -> Result<Var, SymError> {
        if name == "u" {
            return Ok(Var::u());
        }
        if let Some(sub) = name.strip_prefix("u_") {
            return JetIndex::from_letters(sub)
                .filter(|j| j.order() > 0)
                .map(Var::Jet)
                .ok_or_else(|| SymError::Undeclared(name.to_string()));
        }
        if name == "theta" {
            return Ok(Var::Sym("q".into()));
        }
        if table.contains(name) {
            Ok(Var::Sym(name.to_string()))
        } else {
            Err(SymError::Undeclared(name.to_string()))
        }
    }
}

/// Argument slot of an unknown function that `v` addresses, if any.
fn unknown_slot(v: &Var) -> Option<usize> {
    match v {
        Var::Sym(s) => match s.as_str() {
            "r" => Some(0),
            "q" => Some(1),
            "z" => Some(2),
            _ => None,
        },
        Var::Jet(j) if *j == JetIndex::U => Some(3),
        Var::Jet(_) => None,
    }
}

fn depends_on(e: &Expr, v: &Var) -> bool {
    let slot = unknown_slot(v);
    e.any(&|x| match (x.node(), v) {
        (Node::Sym(s), Var::Sym(t)) => s == t,
        (Node::Jet(j), Var::Jet(k)) => j == k,
        (Node::Unknown(_), _) => slot.is_some(),
        _ => false,
    })
}

/// Formal partial derivative. Jet coordinates are independent symbols; the
/// unknown functions depend on `r`, `q`, `z` and `u` only.
pub fn differentiate(e: &Expr, v: &Var) -> Result<Expr, SymError> {
    if !depends_on(e, v) {
        return Ok(Expr::zero());
    }
    Ok(match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Sym(s) => match v {
            Var::Sym(t) if s == t => Expr::one(),
            _ => Expr::zero(),
        },
        Node::Jet(j) => match v {
            Var::Jet(k) if j == k => Expr::one(),
            _ => Expr::zero(),
        },
        Node::Unknown(f) => match unknown_slot(v) {
            Some(slot) => Expr::unknown(f.bump(slot)),
            None => Expr::zero(),
        },
        Node::Func(k, a) => {
            let da = differentiate(a, v)?;
            let outer = match k {
                Func::Sin => a.cos(),
                Func::Cos => -a.sin(),
                Func::Exp => e.clone(),
                Func::Ln => a.recip(),
                Func::Arctan => (Expr::one() + a.powi(2)).recip(),
            };
            outer * da
        }
        Node::Bessel(kind, order, arg) => {
            if depends_on(order, v) {
                return Err(SymError::OrderDependsOnVariable {
                    kind: kind.name(),
                    var: v.to_string(),
                });
            }
            let da = differentiate(arg, v)?;
            let lower = Expr::bessel(*kind, order - &Expr::one(), arg.clone());
            let upper = Expr::bessel(*kind, order + &Expr::one(), arg.clone());
            Expr::rational(rat(1, 2)) * (lower - upper) * da
        }
        Node::Pow(b, n) => {
            let db = differentiate(b, v)?;
            Expr::rational(n.clone()) * Expr::pow(b.clone(), n - int(1)) * db
        }
        Node::Mul(fs) => {
            let mut terms = Vec::new();
            for i in 0..fs.len() {
                let d = differentiate(&fs[i], v)?;
                if d.is_zero() {
                    continue;
                }
                let mut prod: Vec<Expr> = fs.clone();
                prod[i] = d;
                terms.push(Expr::mul(prod));
            }
            Expr::add(terms)
        }
        Node::Add(ts) => {
            let mut terms = Vec::with_capacity(ts.len());
            for t in ts {
                terms.push(differentiate(t, v)?);
            }
            Expr::add(terms)
        }
    })
}

/// Simultaneous substitution of symbols and jet coordinates.
pub fn substitute(e: &Expr, bindings: &BTreeMap<Var, Expr>) -> Expr {
    if bindings.is_empty() {
        return e.clone();
    }
    e.rebuild(&|leaf| match leaf.node() {
        Node::Sym(s) => bindings.get(&Var::Sym(s.clone())).cloned(),
        Node::Jet(j) => bindings.get(&Var::Jet(*j)).cloned(),
        _ => None,
    })
}

pub fn substitute_one(e: &Expr, v: Var, value: Expr) -> Expr {
    substitute(e, &BTreeMap::from([(v, value)]))
}

/// Replaces unknown-function nodes (with their derivative index) by
/// concrete expressions.
pub fn substitute_unknowns(e: &Expr, f: &dyn Fn(UnknownFn) -> Option<Expr>) -> Expr {
    e.rebuild(&|leaf| match leaf.node() {
        Node::Unknown(u) => f(*u),
        _ => None,
    })
}

/// Re-canonicalizes a tree. Values built through the constructors are
/// already canonical, so this is mostly a no-op; it is kept as the explicit
/// entry point and for trees assembled from foreign parts.
pub fn simplify(e: &Expr) -> Expr {
    e.rebuild(&|_| None)
}
