//! Directional derivatives `v[I]` of candidate invariants.

use std::collections::BTreeMap;

use serde::Serialize;

use super::eval::{eval, Env, Point};
use super::flow::sample_box;
use super::NumError;
use crate::jetprolong::VectorField;
use crate::symcore::Expr;

/// Step for the first derivatives of `I`.
pub const H: f64 = 1e-5;

#[derive(Clone, Debug)]
pub struct InvariantDef {
    pub name: String,
    pub expr: Expr,
    pub constants: BTreeMap<String, f64>,
}

/// `v[I]` at one point: field coefficients evaluated exactly, derivatives of
/// `I` by central differences.
pub fn directional_derivative(
    v: &VectorField,
    i: &Expr,
    p: &Point,
    constants: &BTreeMap<String, f64>,
) -> Result<f64, NumError> {
    let env = Env::new(*p, constants);
    let mut total = 0.0;
    for (k, c) in v.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let ck = eval(c, &env)?;
        let mut a = *p;
        let mut b = *p;
        a[k] += H;
        b[k] -= H;
        let d = (eval(i, &Env::new(a, constants))? - eval(i, &Env::new(b, constants))?) / (2.0 * H);
        total += ck * d;
    }
    Ok(total)
}

/// `max |v[I]|` over seeded samples of the verification box.
pub fn check_invariant(
    v: &VectorField,
    def: &InvariantDef,
    samples: usize,
    seed: u64,
) -> Result<f64, NumError> {
    sample_box(seed, samples).iter().try_fold(0.0f64, |m, p| {
        Ok(m.max(directional_derivative(v, &def.expr, p, &def.constants)?.abs()))
    })
}

/// Like [`check_invariant`], but samples where `I` or the field is not real
/// (at the point or its difference stencil) are counted and skipped.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DomainCheck {
    pub max_abs: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

pub fn check_invariant_on_domain(
    v: &VectorField,
    def: &InvariantDef,
    samples: usize,
    seed: u64,
) -> Result<DomainCheck, NumError> {
    let mut out = DomainCheck {
        max_abs: 0.0,
        evaluated: 0,
        skipped: 0,
    };
    for p in sample_box(seed, samples) {
        match directional_derivative(v, &def.expr, &p, &def.constants) {
            Ok(d) => {
                out.max_abs = out.max_abs.max(d.abs());
                out.evaluated += 1;
            }
            Err(NumError::Domain(_)) => out.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "unverified (paper typo suspected)")]
    Unverified,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Unverified => "unverified (paper typo suspected)",
        }
    }
}
