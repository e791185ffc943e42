//! Moving solutions of the Helmholtz equation along symmetry flows.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::eval::{eval, Compiled, Env, Point};
use super::flow::{flow_endpoint, steps_for, CompiledField};
use super::NumError;
use crate::che;
use crate::jetprolong::VectorField;
use crate::symcore::{differentiate, substitute, Coord, Expr, JetIndex, Var};

/// Step for second derivatives.
pub const H2: f64 = 1e-4;
/// Step for first derivatives.
pub const H1: f64 = 1e-5;
/// RK4 budget per unit parameter inside the transported function.
pub const TRANSPORT_STEPS_PER_UNIT: usize = 2_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fixture {
    CosKz,
    Besselj0Kr,
}

impl Fixture {
    pub const ALL: [Fixture; 2] = [Fixture::CosKz, Fixture::Besselj0Kr];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::CosKz => "cos_kz",
            Fixture::Besselj0Kr => "besselj0_kr",
        }
    }

    pub fn from_name(s: &str) -> Option<Fixture> {
        Fixture::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn expr(self) -> Expr {
        che::expr(match self {
            Fixture::CosKz => "cos(k*z)",
            Fixture::Besselj0Kr => "BesselJ(0, k*r)",
        })
    }
}

/// Left-hand side of the equation with every jet replaced by the
/// corresponding derivative of `f(r, q, z)`.
pub fn residual_expr(f: &Expr) -> Result<Expr, NumError> {
    let lhs = che::pde().lhs;
    let mut map = BTreeMap::new();
    for j in lhs.jets() {
        let mut d = f.clone();
        for c in Coord::ALL {
            for _ in 0..j.counts()[c.index()] {
                d = differentiate(&d, &c.var())?;
            }
        }
        map.insert(Var::Jet(j), d);
    }
    map.insert(Var::Jet(JetIndex::U), f.clone());
    Ok(substitute(&lhs, &map))
}

/// Max residual of `f` itself over the grid, with exact derivatives.
pub fn symbolic_residual(
    f: &Expr,
    grid: &[Point],
    constants: &BTreeMap<String, f64>,
) -> Result<f64, NumError> {
    let res = residual_expr(f)?;
    grid.iter().try_fold(0.0f64, |m, p| {
        Ok(m.max(eval(&res, &Env::new(*p, constants))?.abs()))
    })
}

/// `u + k^2 ...` residual of a scalar function by central differences.
pub fn fd_residual(g: &dyn Fn(&Point) -> Result<f64, NumError>, p: &Point, k: f64) -> Result<f64, NumError> {
    let at = |i: usize, h: f64| -> Result<f64, NumError> {
        let mut q = *p;
        q[i] += h;
        g(&q)
    };
    let c = g(p)?;
    let second = |i: usize| -> Result<f64, NumError> {
        Ok((at(i, H2)? - 2.0 * c + at(i, -H2)?) / (H2 * H2))
    };
    let u_r = (at(0, H1)? - at(0, -H1)?) / (2.0 * H1);
    let r = p[0];
    Ok(second(0)? + u_r / r + second(1)? / (r * r) + second(2)? + k * k * c)
}

/// `f` moved by the flow of one field: `x = base(flow_s(y))`, then `u` is
/// carried back along `flow_{-s}` from `(x, f(x))`. For fields without a
/// `u` component this is `f(g(s) y)`.
pub struct Transported {
    f: Compiled,
    field: CompiledField,
    s: f64,
    per_unit: usize,
}

impl Transported {
    pub fn new(
        f: &Expr,
        v: &VectorField,
        s: f64,
        constants: &BTreeMap<String, f64>,
    ) -> Result<Transported, NumError> {
        Ok(Transported {
            f: Compiled::new(f, constants)?,
            field: CompiledField::new(v, constants)?,
            s,
            per_unit: TRANSPORT_STEPS_PER_UNIT,
        })
    }

    pub fn eval(&self, y: &Point) -> Result<f64, NumError> {
        let steps = steps_for(self.s, self.per_unit);
        let x = if self.field.moves_base() {
            flow_endpoint(&self.field, [y[0], y[1], y[2], 0.0], self.s, steps)?
        } else {
            *y
        };
        let fx = self.f.eval(&x);
        if !fx.is_finite() {
            return Err(NumError::Domain(format!("solution undefined at {x:?}")));
        }
        if !self.field.moves_u() {
            return Ok(fx);
        }
        let back = flow_endpoint(&self.field, [x[0], x[1], x[2], fx], -self.s, steps)?;
        Ok(back[3])
    }
}

/// Max central-difference residual of the transported solution over the grid.
pub fn transport_solution(
    f: &Expr,
    v: &VectorField,
    s: f64,
    grid: &[Point],
    constants: &BTreeMap<String, f64>,
) -> Result<f64, NumError> {
    let k = constants.get("k").copied().unwrap_or(1.0);
    let t = Transported::new(f, v, s, constants)?;
    let g = |p: &Point| t.eval(p);
    let vals: Vec<Result<f64, NumError>> = grid
        .par_iter()
        .map(|p| fd_residual(&g, p, k).map(f64::abs))
        .collect();
    vals.into_iter().try_fold(0.0f64, |m, r| Ok(m.max(r?)))
}

/// Residual of an explicitly given transported function (e.g. a printed
/// formula in `f` and `s`), by central differences.
pub fn formula_residual(
    g: &Expr,
    grid: &[Point],
    constants: &BTreeMap<String, f64>,
) -> Result<f64, NumError> {
    let k = constants.get("k").copied().unwrap_or(1.0);
    let c = Compiled::new(g, constants)?;
    let h = |p: &Point| -> Result<f64, NumError> {
        let v = c.eval(p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumError::Domain(format!("non-finite value at {p:?}")))
        }
    };
    grid.iter()
        .try_fold(0.0f64, |m, p| Ok(m.max(fd_residual(&h, p, k)?.abs())))
}
