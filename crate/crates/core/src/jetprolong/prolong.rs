use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{JetError, VectorField};
use crate::symcore::{differentiate, substitute_one, Coord, Expr, JetIndex, Node, Var};

pub const MAX_ORDER: u32 = 2;

/// Total derivative `D_i e`, refusing to produce jets above order 2.
pub fn total_derivative(e: &Expr, dir: Coord) -> Result<Expr, JetError> {
    total_derivative_capped(e, dir, MAX_ORDER)
}

pub(crate) fn total_derivative_capped(e: &Expr, dir: Coord, cap: u32) -> Result<Expr, JetError> {
    let mut terms = vec![differentiate(e, &dir.var())?];
    let mut jets = e.jets();
    if e.has_unknowns() && !jets.contains(&JetIndex::U) {
        // unknown coefficient functions depend on u
        jets.insert(0, JetIndex::U);
    }
    for j in jets {
        let up = j.bump(dir);
        if up.order() > cap {
            return Err(JetError::OrderOverflow {
                jet: format!("u_{}", up.letters()),
                max: cap,
            });
        }
        let de = differentiate(e, &Var::Jet(j))?;
        if !de.is_zero() {
            terms.push(Expr::jet(up) * de);
        }
    }
    Ok(Expr::add(terms))
}

fn total_derivative_multi(e: &Expr, j: JetIndex, cap: u32) -> Result<Expr, JetError> {
    let mut acc = e.clone();
    for c in Coord::ALL {
        for _ in 0..j.counts()[c.index()] {
            acc = total_derivative_capped(&acc, c, cap)?;
        }
    }
    Ok(acc)
}

/// `Q = eta - sum_i xi^i u_i`.
pub fn characteristic(v: &VectorField) -> Expr {
    let mut terms = vec![v.eta.clone()];
    for c in Coord::ALL {
        terms.push(-(&v.xi[c.index()] * &Expr::jet(JetIndex::of(&[c]))));
    }
    Expr::add(terms)
}

/// A vector field lifted to the second jet space.
#[derive(Clone, Debug, PartialEq)]
pub struct ProlongedField {
    pub base: VectorField,
    pub coeffs: BTreeMap<JetIndex, Expr>,
}

impl ProlongedField {
    pub fn coeff(&self, j: JetIndex) -> &Expr {
        &self.coeffs[&j]
    }

    /// Applies the prolonged field as a derivation on a jet-space function.
    pub fn apply(&self, f: &Expr) -> Result<Expr, JetError> {
        let mut terms = Vec::new();
        for (c, var) in self.base.coeffs().iter().zip(VectorField::base_vars()) {
            if !c.is_zero() {
                terms.push((*c) * &differentiate(f, &var)?);
            }
        }
        for j in f.jets() {
            if j.order() == 0 {
                continue;
            }
            let coeff = self.coeffs.get(&j).ok_or(JetError::OrderOverflow {
                jet: format!("u_{}", j.letters()),
                max: MAX_ORDER,
            })?;
            let d = differentiate(f, &Var::Jet(j))?;
            if !d.is_zero() && !coeff.is_zero() {
                terms.push(coeff * &d);
            }
        }
        Ok(Expr::add(terms))
    }
}

/// Second prolongation via `eta_J = D_J Q + sum_i xi^i u_{J,i}`.
pub fn prolong2(v: &VectorField) -> Result<ProlongedField, JetError> {
    let q = characteristic(v);
    let results: Vec<Result<(JetIndex, Expr), JetError>> = JetIndex::all_up_to(MAX_ORDER)
        .into_par_iter()
        .map(|j| {
            let mut terms = vec![total_derivative_multi(&q, j, MAX_ORDER + 1)?];
            for c in Coord::ALL {
                terms.push(&v.xi[c.index()] * &Expr::jet(j.bump(c)));
            }
            let e = Expr::add(terms);
            if let Some(bad) = e.jets().into_iter().find(|k| k.order() > MAX_ORDER) {
                return Err(JetError::OrderOverflow {
                    jet: format!("u_{}", bad.letters()),
                    max: MAX_ORDER,
                });
            }
            Ok((j, e))
        })
        .collect();
    let coeffs = results.into_iter().collect::<Result<BTreeMap<_, _>, _>>()?;
    Ok(ProlongedField {
        base: v.clone(),
        coeffs,
    })
}

/// A scalar PDE `lhs = 0` solved for one leading derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct Pde {
    pub lhs: Expr,
    pub leading: JetIndex,
    pub solved_rhs: Expr,
}

impl Pde {
    /// Solves `lhs = 0` for `leading`; the equation must be affine in it with
    /// a coefficient free of jets.
    pub fn new(lhs: Expr, leading: JetIndex) -> Result<Pde, JetError> {
        let name = format!("u_{}", leading.letters());
        if leading.order() == 0 || leading.order() > MAX_ORDER {
            return Err(JetError::BadLeading(name));
        }
        let var = Var::Jet(leading);
        let a = differentiate(&lhs, &var)?;
        if a.is_zero() {
            return Err(JetError::BadLeading(name));
        }
        if a.jets().iter().any(|j| j.order() > 0) {
            return Err(JetError::NotAffine(name));
        }
        if !differentiate(&a, &var)?.is_zero() {
            return Err(JetError::NotAffine(name));
        }
        if !is_monomial(&a) {
            return Err(JetError::NotAffine(name));
        }
        let b = substitute_one(&lhs, var, Expr::zero());
        let solved_rhs = -(b * a.recip());
        Ok(Pde {
            lhs,
            leading,
            solved_rhs,
        })
    }

    pub fn on_shell(&self, e: &Expr) -> Expr {
        substitute_one(e, Var::Jet(self.leading), self.solved_rhs.clone())
    }
}

/// Whether an expression is a single product (so its reciprocal stays
/// canonical).
fn is_monomial(e: &Expr) -> bool {
    !matches!(e.node(), Node::Add(_))
}

/// `pr2 v (lhs)` restricted to the equation manifold.
pub fn invariance_residual(v: &VectorField, pde: &Pde) -> Result<Expr, JetError> {
    let pr = prolong2(v)?;
    let raw = pr.apply(&pde.lhs)?;
    Ok(pde.on_shell(&raw))
}
