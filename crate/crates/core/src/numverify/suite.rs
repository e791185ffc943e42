//! The three verification suites run by the command line and the
//! acceptance checks. Every report is deterministic for a given seed.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::eval::Point;
use super::flow::{
    check_group_law, flow_endpoint, point_distance, sample_box, steps_for, sup_diff,
    translate_polar, verify_closed_form, CompiledField, STEPS_PER_UNIT,
};
use super::invariant::{check_invariant_on_domain, InvariantDef, Status};
use super::transport::{formula_residual, symbolic_residual, transport_solution, Fixture};
use super::NumError;
use crate::che;
use crate::jetprolong::VectorField;
use crate::symcore::{parse_with, substitute, Expr, SymbolTable, Var};

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        OracleReport {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupLawReport {
    pub generator: usize,
    pub starts: usize,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormReport {
    pub flow: usize,
    pub status: String,
    pub passed: bool,
    /// `"+s"` or `"-s"`: which integrated parameter the print reproduces.
    pub sign: Option<String>,
    pub max_diff_plus: Option<f64>,
    pub max_diff_minus: Option<f64>,
    pub compared: usize,
    pub skipped: usize,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowSuite {
    pub seed: u64,
    pub group_law: Vec<GroupLawReport>,
    pub cartesian: Vec<OracleReport>,
    pub u_component: Vec<OracleReport>,
    pub rk4_order: OracleReport,
    pub closed_forms: Vec<ClosedFormReport>,
}

impl FlowSuite {
    /// Everything except the printed closed forms.
    pub fn integration_passed(&self) -> bool {
        self.group_law.iter().all(|g| g.passed)
            && self.cartesian.iter().all(|c| c.passed)
            && self.u_component.iter().all(|c| c.passed)
            && self.rk4_order.passed
    }

    pub fn passed(&self) -> bool {
        self.integration_passed() && self.closed_forms.iter().all(|c| c.passed || c.flow > 5)
    }
}

fn compiled_generators(k: f64) -> Vec<CompiledField> {
    let c = BTreeMap::from([("k".to_string(), k)]);
    che::generators()
        .iter()
        .map(|v| CompiledField::new(v, &c).expect("generators compile"))
        .collect()
}

pub const GROUP_TOL: f64 = 1e-8;
pub const CLOSED_FORM_TOL: f64 = 1e-7;

fn group_law(fields: &[CompiledField], seed: u64) -> Vec<GroupLawReport> {
    let starts = sample_box(seed, 20);
    fields
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let res: Result<f64, NumError> = starts.iter().try_fold(0.0f64, |m, p| {
                Ok(m.max(check_group_law(v, *p, 0.3, 0.4, STEPS_PER_UNIT)?))
            });
            let (max_discrepancy, error) = match res {
                Ok(d) => (d, None),
                Err(e) => (f64::INFINITY, Some(e.to_string())),
            };
            GroupLawReport {
                generator: i + 1,
                starts: starts.len(),
                max_discrepancy,
                tolerance: GROUP_TOL,
                passed: max_discrepancy <= GROUP_TOL,
                error,
            }
        })
        .collect()
}

/// X4 and X5 are the Cartesian translations `d/dy` and `-d/dx`.
fn cartesian(fields: &[CompiledField], seed: u64) -> Vec<OracleReport> {
    let starts = sample_box(seed.wrapping_add(1), 100);
    [(4usize, (0.0, 1.0)), (5, (-1.0, 0.0))]
        .into_iter()
        .map(|(i, (dx, dy))| {
            let s = 0.5;
            let worst = starts
                .par_iter()
                .map(|p| {
                    let end = flow_endpoint(&fields[i - 1], *p, s, steps_for(s, STEPS_PER_UNIT));
                    end.map(|e| point_distance(&e, &translate_polar(*p, dx * s, dy * s)))
                        .unwrap_or(f64::INFINITY)
                })
                .reduce(|| 0.0, f64::max);
            OracleReport::at_most(format!("X{i} vs Cartesian translation"), worst, GROUP_TOL)
        })
        .collect()
}

fn u_component(fields: &[CompiledField], seed: u64) -> Vec<OracleReport> {
    let starts = sample_box(seed.wrapping_add(2), 20);
    let s = 0.7;
    let mut kept = 0.0f64;
    let mut scaled = 0.0f64;
    for (i, v) in fields.iter().enumerate() {
        for p in &starts {
            let end = match flow_endpoint(v, *p, s, steps_for(s, STEPS_PER_UNIT)) {
                Ok(e) => e,
                Err(_) => [f64::INFINITY; 4],
            };
            if i == 2 {
                scaled = scaled.max((end[3] - p[3] * s.exp()).abs());
            } else {
                kept = kept.max((end[3] - p[3]).abs());
            }
        }
    }
    vec![
        OracleReport::at_most("u preserved by X1, X2, X4..X7", kept, 1e-10),
        OracleReport::at_most("u -> u*exp(s) under X3", scaled, 1e-8),
    ]
}

/// Convergence exponent of RK4 on the X4 flow against exact translation.
pub fn rk4_exponent(v: &CompiledField, p: Point, s: f64) -> f64 {
    let exact = translate_polar(p, 0.0, s);
    let err = |n: usize| sup_diff(&flow_endpoint(v, p, s, n).expect("flow"), &exact);
    let (a, b) = (err(10), err(20));
    (a / b).log2()
}

fn closed_forms(fields: &[CompiledField], seed: u64, tol: f64) -> Vec<ClosedFormReport> {
    let constants = che::i1_constants();
    let mut starts = vec![[1.0, 0.8, 0.0, 0.0], [1.0, 0.5, 0.7, 0.0]];
    starts.extend(sample_box(seed.wrapping_add(3), 20));
    let s = 0.5;
    che::printed_flows()
        .par_iter()
        .map(|flow| {
            let mut plus = 0.0f64;
            let mut minus = 0.0f64;
            let mut compared = 0;
            let mut skipped = 0;
            let mut first_skip = None;
            for p in &starts {
                match verify_closed_form(flow, &fields[flow.index - 1], *p, s, &constants) {
                    Ok(c) => {
                        compared += 1;
                        plus = plus.max(c.diff_plus);
                        minus = minus.max(c.diff_minus);
                    }
                    Err(e) => {
                        skipped += 1;
                        first_skip.get_or_insert(e.to_string());
                    }
                }
            }
            let counts = (compared, skipped);
            closed_form_report(flow.index, flow.uses_t, plus, minus, counts, first_skip, tol)
        })
        .collect()
}

fn closed_form_report(
    flow: usize,
    uses_t: bool,
    plus: f64,
    minus: f64,
    (compared, skipped): (usize, usize),
    first_skip: Option<String>,
    tol: f64,
) -> ClosedFormReport {
    let sign = if compared == 0 {
        None
    } else if plus <= tol {
        Some("+s".to_string())
    } else if minus <= tol {
        Some("-s".to_string())
    } else {
        None
    };
    let matched = sign.is_some();
    let (status, detail) = match (uses_t, compared, matched) {
        (true, 0, _) => (
            "unverified: formula contains undefined parameter t".to_string(),
            format!(
                "with t read as q the print is not real at any start ({})",
                first_skip.unwrap_or_default()
            ),
        ),
        (true, _, true) => (
            "verified (t read as q)".to_string(),
            "the print agrees with integration".to_string(),
        ),
        (true, _, false) => (
            "unverified: formula contains undefined parameter t".to_string(),
            "with t read as q the print disagrees with integration".to_string(),
        ),
        (false, 0, _) => (
            "unverified".to_string(),
            format!("no start inside the formula domain ({})", first_skip.unwrap_or_default()),
        ),
        (false, _, true) => ("match".to_string(), String::new()),
        (false, _, false) => (
            "mismatch".to_string(),
            "the print disagrees with integration for both signs of s".to_string(),
        ),
    };
    let seen = |d: f64| (compared > 0).then_some(d);
    ClosedFormReport {
        flow,
        passed: matched,
        status,
        sign,
        max_diff_plus: seen(plus),
        max_diff_minus: seen(minus),
        compared,
        skipped,
        tolerance: tol,
        detail,
    }
}

/// `tol` overrides the closed-form tolerance.
pub fn verify_flows(seed: u64, tol: Option<f64>) -> FlowSuite {
    let fields = compiled_generators(1.0);
    FlowSuite {
        seed,
        group_law: group_law(&fields, seed),
        cartesian: cartesian(&fields, seed),
        u_component: u_component(&fields, seed),
        rk4_order: {
            let e = rk4_exponent(&fields[3], [1.0, 0.8, 0.0, 0.0], 0.5);
            OracleReport {
                name: "RK4 convergence exponent on the X4 flow".into(),
                value: e,
                tolerance: 3.7,
                passed: e >= 3.7,
            }
        },
        closed_forms: closed_forms(&fields, seed, tol.unwrap_or(CLOSED_FORM_TOL)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportReport {
    pub fixture: String,
    pub generator: usize,
    pub s: f64,
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportSuite {
    pub seed: u64,
    pub grid: Vec<Point>,
    pub pre: Vec<OracleReport>,
    pub post: Vec<TransportReport>,
    /// The printed `f - s` rule for the `u`-scaling direction, checked as
    /// written at `s = 0.3`.
    pub printed_g3: Vec<OracleReport>,
}

impl TransportSuite {
    pub fn passed(&self) -> bool {
        self.pre.iter().all(|r| r.passed) && self.post.iter().all(|r| r.passed)
    }
}

pub const PRE_TOL: f64 = 1e-8;
pub const POST_TOL: f64 = 1e-5;

fn printed_g3(f: &Expr, s: f64) -> Expr {
    let table = SymbolTable::empty().with(&["f", "s"]);
    let e = parse_with(che::PRINTED_G3_TRANSPORT, &table).expect("printed transport parses");
    substitute(
        &e,
        &BTreeMap::from([
            (Var::Sym("f".into()), f.clone()),
            (Var::Sym("s".into()), che::expr(&s.to_string())),
        ]),
    )
}

/// `tol` overrides the post-transport tolerance.
pub fn verify_transport(seed: u64, k: f64, tol: Option<f64>) -> TransportSuite {
    let constants = BTreeMap::from([("k".to_string(), k)]);
    let grid: Vec<Point> = sample_box(seed, 6)
        .into_iter()
        .map(|p| [p[0], p[1], p[2], 0.0])
        .collect();
    let generators = che::generators();
    let mut pre = Vec::new();
    let mut post = Vec::new();
    let mut g3 = Vec::new();
    let post_tol = tol.unwrap_or(POST_TOL);
    for fx in Fixture::ALL {
        let f = fx.expr();
        let r = symbolic_residual(&f, &grid, &constants).unwrap_or(f64::INFINITY);
        pre.push(OracleReport::at_most(fx.name(), r, PRE_TOL));
        for (i, v) in generators.iter().enumerate() {
            for s in [0.3, 0.7] {
                post.push(transport_one(fx, &f, (i + 1, v), s, &grid, &constants, post_tol));
            }
        }
        let r = formula_residual(&printed_g3(&f, 0.3), &grid, &constants).unwrap_or(f64::INFINITY);
        g3.push(OracleReport::at_most(format!("{}: f - s", fx.name()), r, post_tol));
    }
    TransportSuite {
        seed,
        grid,
        pre,
        post,
        printed_g3: g3,
    }
}

fn transport_one(
    fx: Fixture,
    f: &Expr,
    (generator, v): (usize, &VectorField),
    s: f64,
    grid: &[Point],
    constants: &BTreeMap<String, f64>,
    tol: f64,
) -> TransportReport {
    let (max_residual, error) = match transport_solution(f, v, s, grid, constants) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    TransportReport {
        fixture: fx.name().into(),
        generator,
        s,
        passed: max_residual.is_some_and(|r| r <= tol),
        max_residual,
        tolerance: tol,
        error,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub name: String,
    pub max_abs: Option<f64>,
    /// Samples where the expression was real, and those skipped.
    pub evaluated: usize,
    pub skipped: usize,
    pub tolerance: f64,
    pub status: Status,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantSuite {
    pub seed: u64,
    pub samples: usize,
    pub i1: InvariantReport,
    /// The printed I2 and the variant with `r` in the Bessel arguments.
    pub i2: Vec<InvariantReport>,
    /// Names of the I2 variants annihilated by the field, if any.
    pub i2_annihilating: Vec<String>,
    pub i3: InvariantReport,
}

impl InvariantSuite {
    pub fn all(&self) -> Vec<&InvariantReport> {
        let mut v = vec![&self.i1];
        v.extend(&self.i2);
        v.push(&self.i3);
        v
    }
}

pub const I1_TOL: f64 = 1e-6;
pub const I2_TOL: f64 = 1e-5;
pub const I3_TOL: f64 = 1e-6;

fn invariant_report(
    name: &str,
    expr: Expr,
    constants: BTreeMap<String, f64>,
    tolerance: f64,
    otherwise: Status,
    samples: usize,
    seed: u64,
) -> InvariantReport {
    let def = InvariantDef {
        name: name.into(),
        expr,
        constants,
    };
    let v = che::solved_field();
    match check_invariant_on_domain(&v, &def, samples, seed) {
        Ok(c) if c.evaluated > 0 => InvariantReport {
            name: name.into(),
            max_abs: Some(c.max_abs),
            evaluated: c.evaluated,
            skipped: c.skipped,
            tolerance,
            status: if c.max_abs <= tolerance { Status::Pass } else { otherwise },
            error: None,
        },
        Ok(c) => InvariantReport {
            name: name.into(),
            max_abs: None,
            evaluated: 0,
            skipped: c.skipped,
            tolerance,
            status: otherwise,
            error: Some("not real at any sample".into()),
        },
        Err(e) => InvariantReport {
            name: name.into(),
            max_abs: None,
            evaluated: 0,
            skipped: 0,
            tolerance,
            status: otherwise,
            error: Some(e.to_string()),
        },
    }
}

/// `tol` overrides the tolerance of all three invariants.
pub fn verify_invariants(seed: u64, samples: usize, tol: Option<f64>) -> InvariantSuite {
    let i1 = invariant_report("I1", che::i1(), che::i1_constants(), tol.unwrap_or(I1_TOL), Status::Fail, samples, seed);
    let i2: Vec<InvariantReport> = [("I2 (printed)", che::i2_printed()), ("I2 (Bessel argument times r)", che::i2_with_r())]
        .into_iter()
        .map(|(n, e)| {
            invariant_report(n, e, che::i2_constants(), tol.unwrap_or(I2_TOL), Status::Unverified, samples, seed)
        })
        .collect();
    let i3 = invariant_report("I3", che::i3(), che::i3_constants(), tol.unwrap_or(I3_TOL), Status::Unverified, samples, seed);
    InvariantSuite {
        seed,
        samples,
        i2_annihilating: i2
            .iter()
            .filter(|r| r.status == Status::Pass)
            .map(|r| r.name.clone())
            .collect(),
        i1,
        i2,
        i3,
    }
}
