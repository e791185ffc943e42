//! One-parameter groups of vector fields by classical RK4.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::eval::{eval_complex, Compiled, Env, Point};
use super::NumError;
use crate::che::PrintedFlow;
use crate::jetprolong::VectorField;

/// Integration stops once `r` drops below this.
pub const MIN_R: f64 = 1e-6;
/// Default RK4 budget per unit of the group parameter.
pub const STEPS_PER_UNIT: usize = 10_000;

pub fn steps_for(s: f64, per_unit: usize) -> usize {
    ((s.abs() * per_unit as f64).ceil() as usize).max(1)
}

/// Field coefficients compiled for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledField {
    coeffs: [Compiled; 4],
    /// Which components are identically zero.
    zero: [bool; 4],
}

impl CompiledField {
    pub fn new(v: &VectorField, constants: &BTreeMap<String, f64>) -> Result<Self, NumError> {
        let c = v.coeffs();
        let compiled: Vec<Compiled> = c
            .iter()
            .map(|e| Compiled::new(e, constants))
            .collect::<Result<_, _>>()?;
        Ok(CompiledField {
            coeffs: compiled.try_into().expect("four coefficients"),
            zero: c.map(|e| e.is_zero()),
        })
    }

    pub fn rhs(&self, p: &Point) -> [f64; 4] {
        std::array::from_fn(|i| if self.zero[i] { 0.0 } else { self.coeffs[i].eval(p) })
    }

    pub fn moves_base(&self) -> bool {
        !(self.zero[0] && self.zero[1] && self.zero[2])
    }

    pub fn moves_u(&self) -> bool {
        !self.zero[3]
    }
}

fn axpy(p: &Point, h: f64, k: &[f64; 4]) -> Point {
    std::array::from_fn(|i| p[i] + h * k[i])
}

fn guard(p: &Point, s: f64) -> Result<(), NumError> {
    if p.iter().any(|x| !x.is_finite()) {
        return Err(NumError::Domain(format!("flow left the domain at s = {s}: {p:?}")));
    }
    if p[0] < MIN_R {
        return Err(NumError::SingularityApproach { s, r: p[0] });
    }
    Ok(())
}

/// Endpoint of `steps` RK4 steps over `[0, s]`.
pub fn flow_endpoint(v: &CompiledField, p0: Point, s: f64, steps: usize) -> Result<Point, NumError> {
    if steps == 0 {
        return Err(NumError::InvalidSteps);
    }
    let h = s / steps as f64;
    let mut p = p0;
    guard(&p, 0.0)?;
    for n in 0..steps {
        let t = n as f64 * h;
        let k1 = v.rhs(&p);
        let a = axpy(&p, h / 2.0, &k1);
        guard(&a, t + h / 2.0)?;
        let k2 = v.rhs(&a);
        let b = axpy(&p, h / 2.0, &k2);
        guard(&b, t + h / 2.0)?;
        let k3 = v.rhs(&b);
        let c = axpy(&p, h, &k3);
        guard(&c, t + h)?;
        let k4 = v.rhs(&c);
        p = std::array::from_fn(|i| p[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        guard(&p, t + h)?;
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FlowResult {
    pub endpoint: Point,
    pub steps: usize,
    pub step_size: f64,
    /// `|x_h - x_2h| / 15` from a run with half the steps.
    pub local_error_estimate: f64,
}

pub fn integrate_flow(
    v: &CompiledField,
    p0: Point,
    s: f64,
    steps: usize,
) -> Result<FlowResult, NumError> {
    let endpoint = flow_endpoint(v, p0, s, steps)?;
    let coarse = flow_endpoint(v, p0, s, (steps / 2).max(1))?;
    Ok(FlowResult {
        endpoint,
        steps,
        step_size: s / steps as f64,
        local_error_estimate: sup_diff(&endpoint, &coarse) / 15.0,
    })
}

pub fn sup_diff(a: &Point, b: &Point) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `|flow(s)(flow(t)(p0)) - flow(s + t)(p0)|_inf`.
pub fn check_group_law(
    v: &CompiledField,
    p0: Point,
    s: f64,
    t: f64,
    per_unit: usize,
) -> Result<f64, NumError> {
    let mid = flow_endpoint(v, p0, t, steps_for(t, per_unit))?;
    let two = flow_endpoint(v, mid, s, steps_for(s, per_unit))?;
    let one = flow_endpoint(v, p0, s + t, steps_for(s + t, per_unit))?;
    Ok(sup_diff(&two, &one))
}

/// Exact image of `(r, q)` under the Cartesian translation by `(dx, dy)`,
/// with the angle continued from `q`.
pub fn translate_polar(p: Point, dx: f64, dy: f64) -> Point {
    let x = p[0] * p[1].cos() + dx;
    let y = p[0] * p[1].sin() + dy;
    let q = y.atan2(x);
    [x.hypot(y), p[1] + wrap_angle(q - p[1]), p[2], p[3]]
}

/// Angle difference reduced to `(-pi, pi]`.
pub fn wrap_angle(d: f64) -> f64 {
    let y = (d + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

/// Sup distance treating the angle modulo `2 pi`.
pub fn point_distance(a: &Point, b: &Point) -> f64 {
    [
        (a[0] - b[0]).abs(),
        wrap_angle(a[1] - b[1]).abs(),
        (a[2] - b[2]).abs(),
        (a[3] - b[3]).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Seeded uniform samples from the verification box
/// `r in [0.5, 3], q in [0.1, 1.4], z in [-1, 1], u in [-1, 1]`.
pub fn sample_box(seed: u64, n: usize) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            [
                rng.random_range(0.5..=3.0),
                rng.random_range(0.1..=1.4),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            ]
        })
        .collect()
}

/// Evaluates a printed closed-form flow at `(p0, s)`; complex components are
/// a formula domain error.
pub fn eval_printed_flow(
    flow: &PrintedFlow,
    p0: Point,
    s: f64,
    constants: &BTreeMap<String, f64>,
) -> Result<Point, NumError> {
    let mut env = Env::new(p0, constants);
    env.constants.insert("s".into(), s);
    let mut out = [0.0; 4];
    for (i, c) in flow.components.iter().enumerate() {
        let v = eval_complex(c, &env)?;
        if v.im.abs() > 1e-12 * v.re.abs().max(1.0) || !v.re.is_finite() {
            return Err(NumError::FormulaDomain {
                flow: flow.index,
                component: i,
                value: format!("{v}"),
            });
        }
        out[i] = v.re;
    }
    Ok(out)
}

/// Comparison of one printed flow with integration at one start.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormCheck {
    pub start: Point,
    pub s: f64,
    pub printed: Point,
    pub integrated: Point,
    /// Distance to the integrated flow at `+s` and at `-s`.
    pub diff_plus: f64,
    pub diff_minus: f64,
}

impl ClosedFormCheck {
    pub fn best(&self) -> f64 {
        self.diff_plus.min(self.diff_minus)
    }
}

pub fn verify_closed_form(
    flow: &PrintedFlow,
    field: &CompiledField,
    p0: Point,
    s: f64,
    constants: &BTreeMap<String, f64>,
) -> Result<ClosedFormCheck, NumError> {
    let printed = eval_printed_flow(flow, p0, s, constants)?;
    let steps = steps_for(s, STEPS_PER_UNIT);
    let plus = flow_endpoint(field, p0, s, steps)?;
    let minus = flow_endpoint(field, p0, -s, steps)?;
    Ok(ClosedFormCheck {
        start: p0,
        s,
        printed,
        integrated: plus,
        diff_plus: point_distance(&printed, &plus),
        diff_minus: point_distance(&printed, &minus),
    })
}
