use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{invariance_residual, JetError, Pde, VectorField};
use crate::linalg;
use crate::symcore::{
    differentiate, int, rat, substitute, substitute_unknowns, Coord, Expr, Node,
    Rational, UnknownFn, UnknownName, Var,
};

/// One determining equation together with the jet monomial whose
/// coefficient produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct DetEquation {
    pub monomial: Expr,
    pub equation: Expr,
}

/// The generator ansatz with unknown coefficient functions.
pub fn generic_field() -> VectorField {
    VectorField::from_coeffs(UnknownName::ALL.map(|n| Expr::unknown(UnknownFn::new(n))))
}

fn is_jet_factor(f: &Expr) -> bool {
    match f.node() {
        Node::Jet(j) => j.order() > 0,
        Node::Pow(b, _) => matches!(b.node(), Node::Jet(j) if j.order() > 0),
        _ => false,
    }
}

/// Splits a polynomial in the jets of order >= 1 into monomial -> coefficient.
pub fn collect_jet_monomials(e: &Expr) -> BTreeMap<Expr, Expr> {
    let mut groups: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    for t in e.terms() {
        let (jets, rest): (Vec<Expr>, Vec<Expr>) =
            t.factors().into_iter().partition(is_jet_factor);
        groups
            .entry(Expr::mul(jets))
            .or_default()
            .push(Expr::mul(rest));
    }
    groups
        .into_iter()
        .map(|(m, ts)| (m, Expr::add(ts)))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

fn r_exponent(term: &Expr) -> Rational {
    let r = Coord::R.expr();
    for f in term.factors() {
        if f == r {
            return int(1);
        }
        if let Node::Pow(b, n) = f.node() {
            if *b == r {
                return n.clone();
            }
        }
    }
    Rational::zero()
}

/// Removes the common power of `r` and scales so the first term has
/// coefficient one.
pub fn normalize_equation(e: &Expr) -> Expr {
    let terms = e.terms();
    let Some(min) = terms.iter().map(r_exponent).min() else {
        return Expr::zero();
    };
    let cleared = if min.is_zero() {
        e.clone()
    } else {
        e * &Expr::pow(Coord::R.expr(), -min)
    };
    let (c, _) = cleared.terms()[0].split_coeff();
    &cleared * &Expr::rational(c.recip())
}

/// Machine-generated determining system: coefficients of every jet monomial
/// in the on-shell residual of the ansatz, denominators in `r` cleared,
/// deduplicated.
pub fn determining_system(pde: &Pde) -> Result<Vec<DetEquation>, JetError> {
    let residual = invariance_residual(&generic_field(), pde)?;
    let mut out: Vec<DetEquation> = Vec::new();
    for (monomial, coeff) in collect_jet_monomials(&residual) {
        let equation = normalize_equation(&coeff);
        if equation.is_zero() || out.iter().any(|d| d.equation == equation) {
            continue;
        }
        out.push(DetEquation { monomial, equation });
    }
    Ok(out)
}

/// Substitutes the coefficients of a concrete field (and their partial
/// derivatives) for the unknown functions.
pub fn instantiate(e: &Expr, v: &VectorField) -> Expr {
    let vars = VectorField::base_vars();
    let coeffs = v.coeffs();
    substitute_unknowns(e, &|f: UnknownFn| {
        let slot = match f.name {
            UnknownName::Xi1 => 0,
            UnknownName::Xi2 => 1,
            UnknownName::Xi3 => 2,
            UnknownName::Eta => 3,
        };
        let mut acc = coeffs[slot].clone();
        for (i, var) in vars.iter().enumerate() {
            for _ in 0..f.index[i] {
                acc = differentiate(&acc, var).ok()?;
            }
        }
        Some(acc)
    })
}

/// Coefficients of an expression that is linear and homogeneous in the
/// unknown functions with rational coefficients.
fn linear_form(e: &Expr) -> Option<BTreeMap<UnknownFn, Rational>> {
    let mut out: BTreeMap<UnknownFn, Rational> = BTreeMap::new();
    for t in e.terms() {
        let (c, rest) = t.split_coeff();
        let rest = rest?;
        match rest.node() {
            Node::Unknown(f) => *out.entry(*f).or_insert_with(Rational::zero) += c,
            _ => return None,
        }
    }
    Some(out)
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    loop {
        let den = rng.random_range(1..=7i64);
        let num = rng.random_range(lo * den..=hi * den);
        if num != 0 {
            return rat(num, den);
        }
    }
}

/// Outcome of checking one equation against the generated system.
#[derive(Clone, Debug, PartialEq)]
pub enum Implication {
    Implied,
    NotImplied,
    /// The check could not be carried out exactly (non-rational values).
    Inconclusive(String),
}

/// Checks whether `target` is a pointwise linear consequence of the system
/// and its first derivatives in `r, q, z, u`, at several random rational
/// points. Any failing point refutes implication.
pub fn implied_by(system: &[Expr], target: &Expr, points: usize, seed: u64) -> Implication {
    let vars = VectorField::base_vars();
    let mut gens: Vec<Expr> = system.to_vec();
    let derived: Vec<Expr> = system
        .par_iter()
        .flat_map_iter(|g| {
            vars.iter()
                .filter_map(|v| differentiate(g, v).ok())
                .collect::<Vec<_>>()
        })
        .collect();
    gens.extend(derived);
    gens.retain(|g| !g.is_zero());

    let mut names: Vec<String> = target.symbols();
    for g in &gens {
        names.extend(g.symbols());
    }
    names.sort();
    names.dedup();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..points {
        let mut bind: BTreeMap<Var, Expr> = BTreeMap::new();
        for n in &names {
            let v = if n == "r" {
                random_rational(&mut rng, 1, 3)
            } else {
                random_rational(&mut rng, -2, 2)
            };
            bind.insert(Var::Sym(n.clone()), Expr::rational(v));
        }
        bind.insert(Var::u(), Expr::rational(random_rational(&mut rng, -2, 2)));

        let forms: Option<Vec<_>> = gens
            .par_iter()
            .map(|g| linear_form(&substitute(g, &bind)))
            .collect();
        let Some(forms) = forms else {
            return Implication::Inconclusive("system is not rational at the sample point".into());
        };
        let Some(t) = linear_form(&substitute(target, &bind)) else {
            return Implication::Inconclusive("equation is not rational at the sample point".into());
        };
        let mut keys: Vec<UnknownFn> = t.keys().copied().collect();
        for f in &forms {
            keys.extend(f.keys().copied());
        }
        keys.sort();
        keys.dedup();
        let row = |m: &BTreeMap<UnknownFn, Rational>| -> Vec<Rational> {
            keys.iter()
                .map(|k| m.get(k).cloned().unwrap_or_else(Rational::zero))
                .collect()
        };
        let basis: Vec<Vec<Rational>> = forms.iter().map(row).collect();
        if !linalg::in_span(&basis, &row(&t)) {
            return Implication::NotImplied;
        }
    }
    Implication::Implied
}
