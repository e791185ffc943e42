//! Normal forms of one-dimensional subalgebras of the seven-dimensional
//! symmetry algebra under the adjoint action.
//!
//! The case conditions (twenty cases, branching first on `a3`) select the
//! target class. Each class fixes an axis: the rotation part
//! `w = (a1, a6, a7)` is turned onto that axis and the translation part
//! `t = (a2, a4, a5)` is then reduced to its component along it; for `w = 0`
//! the translation itself is turned onto the axis. Every step kills one
//! coefficient with a parameter solved from the matrix entries.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{adjoint_apply, adjoint_matrices, AdjointError, AdjointMatrix, ClosedForm};
use crate::che;
use crate::symcore::Rational;

pub const CLASS_COUNT: u8 = 17;

/// Zero threshold for case decisions on float input.
const ZERO: f64 = 1e-12;
/// Off-pattern tolerance of the final form.
const PATTERN_TOL: f64 = 1e-9;

const PATTERNS: [&[usize]; 17] = [
    &[1],
    &[2],
    &[6],
    &[7],
    &[3, 1],
    &[3, 4],
    &[3, 6],
    &[3, 7],
    &[1, 2],
    &[4, 6],
    &[5, 7],
    &[3, 1, 2],
    &[3, 4, 6],
    &[1, 2, 5],
    &[2, 5, 7],
    &[4, 5, 6],
    &[3, 1, 2, 5],
];

const LABELS: [&str; 17] = [
    "X1",
    "X2",
    "X6",
    "X7",
    "X3 + a*X1",
    "X3 + a*X4",
    "X3 + a*X6",
    "X3 + a*X7",
    "a*X1 + b*X2",
    "a*X4 + b*X6",
    "a*X5 + b*X7",
    "X3 + a*X1 + b*X2",
    "X3 + a*X4 + b*X6",
    "a*X1 + b*X2 + c*X5",
    "a*X2 + b*X5 + c*X7",
    "a*X4 + b*X5 + c*X6",
    "X3 + a*X1 + b*X2 + c*X5",
];

/// Basis indices (1-based) allowed to be nonzero in class `id`.
pub fn class_pattern(id: u8) -> &'static [usize] {
    PATTERNS[id as usize - 1]
}

pub fn class_label(id: u8) -> &'static str {
    LABELS[id as usize - 1]
}

/// Outcome of the case selection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseInfo {
    pub case: u8,
    /// Class named by the printed case.
    pub printed_class: u8,
    /// Class actually targeted.
    pub class: u8,
    pub note: Option<&'static str>,
}

fn case(case: u8, class: u8) -> CaseInfo {
    CaseInfo {
        case,
        printed_class: class,
        class,
        note: None,
    }
}

fn redirected(case: u8, printed: u8, class: u8, note: &'static str) -> CaseInfo {
    CaseInfo {
        case,
        printed_class: printed,
        class,
        note: Some(note),
    }
}

/// Zero pattern of an element: `zero[i]` for `a_{i+1}`, plus the derived
/// quantities `a5' = a1 a2 + a5 a7` and `a2' = -a2 a7 + a1 a5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZeroFlags {
    pub zero: [bool; 7],
    pub a5p_zero: bool,
    pub a2p_zero: bool,
}

impl ZeroFlags {
    fn from_f64(a: &[f64]) -> ZeroFlags {
        let z = |x: f64| x.abs() <= ZERO;
        ZeroFlags {
            zero: std::array::from_fn(|i| z(a[i])),
            a5p_zero: z(a5p(a)),
            a2p_zero: z(a2p(a)),
        }
    }

    fn from_rational(a: &[Rational]) -> ZeroFlags {
        ZeroFlags {
            zero: std::array::from_fn(|i| a[i].is_zero()),
            a5p_zero: (&a[0] * &a[1] + &a[4] * &a[6]).is_zero(),
            a2p_zero: (-(&a[1] * &a[6]) + &a[0] * &a[4]).is_zero(),
        }
    }

    fn rotation_zero(&self) -> bool {
        self.zero[0] && self.zero[5] && self.zero[6]
    }
}

fn a5p(a: &[f64]) -> f64 {
    a[0] * a[1] + a[4] * a[6]
}

fn a2p(a: &[f64]) -> f64 {
    -a[1] * a[6] + a[0] * a[4]
}

/// The case tree; first matching case wins.
pub fn select_case(f: &ZeroFlags) -> CaseInfo {
    let nz = |i: usize| !f.zero[i - 1];
    if nz(3) {
        if nz(5) && nz(2) {
            return case(1, 17);
        }
        if nz(5) {
            return redirected(2, 11, 17, "class 11 has no X3 term; a3 != 0 is kept");
        }
        if nz(2) && nz(4) {
            if f.rotation_zero() {
                return case(3, 6);
            }
            return redirected(
                3,
                6,
                13,
                "a nonzero rotation part cannot be removed; its axis is kept along X6",
            );
        }
        if nz(2) {
            return case(4, 12);
        }
        if nz(4) && nz(7) {
            return case(5, 13);
        }
        if nz(7) && nz(6) {
            return case(6, 7);
        }
        if nz(7) {
            return case(7, 8);
        }
        if nz(4) {
            return case(8, 13);
        }
        if nz(6) {
            return case(9, 7);
        }
        return case(10, 5);
    }
    if nz(4) && nz(5) {
        return case(11, 16);
    }
    if nz(4) {
        return case(12, 10);
    }
    if nz(7) {
        if !f.a5p_zero {
            return case(13, 15);
        }
        if !f.a2p_zero {
            return redirected(
                14,
                2,
                4,
                "a7 != 0 is a nonzero rotation part with zero pitch, which reaches X7, not X2",
            );
        }
        return case(15, 4);
    }
    if f.a5p_zero && f.a2p_zero && nz(6) {
        return case(16, 3);
    }
    if nz(5) {
        return case(17, 14);
    }
    if nz(2) {
        return case(18, 9);
    }
    if nz(6) {
        return case(19, 3);
    }
    case(20, 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Axis {
    /// rotation axis X1, translation axis X2
    Z,
    /// rotation axis X6, translation axis X4
    Y,
    /// rotation axis X7, translation axis X5
    X,
}

fn axis(class: u8) -> Axis {
    match class {
        1 | 2 | 5 | 9 | 12 | 14 | 17 => Axis::Z,
        3 | 6 | 7 | 10 | 13 | 16 => Axis::Y,
        _ => Axis::X,
    }
}

/// `(generator, coefficient to kill)`, both 1-based.
fn plan(axis: Axis, rotation_zero: bool) -> &'static [(usize, usize)] {
    match (axis, rotation_zero) {
        (Axis::Z, false) => &[(6, 7), (7, 6), (4, 5), (5, 4)],
        (Axis::Y, false) => &[(1, 7), (7, 1), (2, 5), (5, 2)],
        (Axis::X, false) => &[(1, 6), (6, 1), (2, 4), (4, 2)],
        (Axis::Z, true) => &[(7, 4), (6, 5)],
        (Axis::Y, true) => &[(1, 5), (7, 2)],
        (Axis::X, true) => &[(1, 4), (6, 2)],
    }
}

/// One adjoint action of the transcript.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Step {
    pub generator: usize,
    pub s: f64,
    pub kills: usize,
}

fn component(m: &AdjointMatrix, a: &[f64], k: usize, s: f64) -> f64 {
    let mat = m.eval(s);
    a.iter().zip(&mat).map(|(x, row)| x * row[k]).sum()
}

/// Smallest-magnitude `s` with `(a M(s))[k] = 0`.
fn solve_step(m: &AdjointMatrix, a: &[f64], k: usize) -> Option<f64> {
    let f0 = component(m, a, k, 0.0);
    match m.form {
        ClosedForm::Trigonometric => {
            // f(s) = c + p cos s + q sin s
            let f1 = component(m, a, k, PI / 2.0);
            let f2 = component(m, a, k, PI);
            let c = (f0 + f2) / 2.0;
            let p = (f0 - f2) / 2.0;
            let q = f1 - c;
            let r = p.hypot(q);
            if r == 0.0 || c.abs() > r * (1.0 + 1e-12) {
                return None;
            }
            let phi = q.atan2(p);
            let d = (-c / r).clamp(-1.0, 1.0).acos();
            let wrap = |x: f64| {
                let y = (x + PI).rem_euclid(2.0 * PI) - PI;
                if y <= -PI {
                    y + 2.0 * PI
                } else {
                    y
                }
            };
            let (s1, s2) = (wrap(phi + d), wrap(phi - d));
            Some(if s1.abs() <= s2.abs() { s1 } else { s2 })
        }
        ClosedForm::Polynomial => {
            let fp = component(m, a, k, 1.0);
            let fm = component(m, a, k, -1.0);
            let b = (fp - fm) / 2.0;
            let q = (fp + fm) / 2.0 - f0;
            if q.abs() <= 1e-15 * (b.abs() + f0.abs()) {
                return (b != 0.0).then(|| -f0 / b);
            }
            let disc = b * b - 4.0 * q * f0;
            if disc < 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            let r1 = (-b + sq) / (2.0 * q);
            let r2 = (-b - sq) / (2.0 * q);
            Some(if r1.abs() <= r2.abs() { r1 } else { r2 })
        }
    }
}

/// Result of normalizing one element.
#[derive(Clone, Debug, Serialize)]
pub struct NormalFormResult {
    pub input: Vec<f64>,
    /// Factor applied before the adjoint actions (`1/a3` when `a3 != 0`).
    pub scale: f64,
    pub case: CaseInfo,
    pub class_id: u8,
    pub label: &'static str,
    /// Coefficients of the class pattern other than `X3`, in pattern order.
    pub params: Vec<f64>,
    pub transformed: Vec<f64>,
    pub transcript: Vec<Step>,
    /// `a5'` and `a2'` of the scaled input.
    pub audit: BTreeMap<String, f64>,
}

impl NormalFormResult {
    pub fn replay(&self) -> Vec<f64> {
        let mats = mats();
        let scaled: Vec<f64> = self.input.iter().map(|x| x * self.scale).collect();
        let t: Vec<(usize, f64)> = self
            .transcript
            .iter()
            .map(|s| (s.generator - 1, s.s))
            .collect();
        adjoint_apply(mats, &t, &scaled).expect("dimension checked on entry")
    }
}

fn mats() -> &'static [AdjointMatrix] {
    static MATS: std::sync::OnceLock<Vec<AdjointMatrix>> = std::sync::OnceLock::new();
    MATS.get_or_init(|| adjoint_matrices(che::algebra()).expect("closed forms exist"))
}

fn check_dim(n: usize) -> Result<(), AdjointError> {
    if n == 7 {
        Ok(())
    } else {
        Err(AdjointError::Dimension {
            expected: 7,
            got: n,
        })
    }
}

pub fn normalize(x: &[f64]) -> Result<NormalFormResult, AdjointError> {
    check_dim(x.len())?;
    let scale = if x[2].abs() > ZERO { 1.0 / x[2] } else { 1.0 };
    let a: Vec<f64> = x.iter().map(|v| v * scale).collect();
    run(x, scale, &a, ZeroFlags::from_f64(&a))
}

/// As [`normalize`], with exact zero tests on the rational input.
pub fn normalize_exact(x: &[Rational]) -> Result<NormalFormResult, AdjointError> {
    check_dim(x.len())?;
    let xf: Vec<f64> = x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
    let scaled: Vec<Rational> = if x[2].is_zero() {
        x.to_vec()
    } else {
        x.iter().map(|v| v / &x[2]).collect()
    };
    let scale = if x[2].is_zero() {
        1.0
    } else {
        (Rational::from_integer(1.into()) / &x[2])
            .to_f64()
            .unwrap_or(f64::NAN)
    };
    let a: Vec<f64> = scaled.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
    run(&xf, scale, &a, ZeroFlags::from_rational(&scaled))
}

fn run(x: &[f64], scale: f64, a: &[f64], flags: ZeroFlags) -> Result<NormalFormResult, AdjointError> {
    if flags.zero.iter().all(|&z| z) {
        return Err(AdjointError::DegenerateInput);
    }
    let info = select_case(&flags);
    let class = info.class;
    let mats = mats();
    let norm = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut cur = a.to_vec();
    let mut transcript = Vec::new();
    for &(g, k) in plan(axis(class), flags.rotation_zero()) {
        if cur[k - 1].abs() <= 1e-15 * norm {
            continue;
        }
        let Some(s) = solve_step(&mats[g - 1], &cur, k - 1) else {
            continue;
        };
        cur = adjoint_apply(mats, &[(g - 1, s)], &cur)?;
        transcript.push(Step {
            generator: g,
            s,
            kills: k,
        });
    }
    let pattern = class_pattern(class);
    let residual = (1..=7)
        .filter(|i| !pattern.contains(i))
        .map(|i| cur[i - 1].abs())
        .fold(0.0, f64::max);
    if residual > PATTERN_TOL * norm {
        return Err(AdjointError::ToleranceFailure {
            case: info.case,
            class,
            residual,
            transformed: cur,
        });
    }
    for i in 1..=7 {
        if !pattern.contains(&i) {
            cur[i - 1] = 0.0;
        }
    }
    let params = pattern
        .iter()
        .filter(|&&i| i != 3)
        .map(|&i| cur[i - 1])
        .collect();
    let audit = BTreeMap::from([("a5'".to_string(), a5p(a)), ("a2'".to_string(), a2p(a))]);
    Ok(NormalFormResult {
        input: x.to_vec(),
        scale,
        case: info,
        class_id: class,
        label: class_label(class),
        params,
        transformed: cur,
        transcript,
        audit,
    })
}

/// One input per case, chosen to satisfy that case's conditions.
pub const CASE_EXAMPLES: [[f64; 7]; 21] = [
    [0.3, 1.0, 1.0, 0.7, 0.5, 0.2, 0.9],
    [0.3, 0.0, 1.0, 0.7, 0.5, 0.2, 0.9],
    [0.0, 1.0, 1.0, 0.7, 0.0, 0.0, 0.0],
    [0.3, 1.0, 1.0, 0.7, 0.0, 0.2, 0.9],
    [0.4, 1.0, 1.0, 0.0, 0.0, 0.2, 0.9],
    [0.3, 0.0, 1.0, 0.7, 0.0, 0.2, 0.9],
    [0.3, 0.0, 1.0, 0.0, 0.0, 0.2, 0.9],
    [0.3, 0.0, 1.0, 0.0, 0.0, 0.0, 0.9],
    [0.3, 0.0, 1.0, 0.7, 0.0, 0.2, 0.0],
    [0.3, 0.0, 1.0, 0.0, 0.0, 0.2, 0.0],
    [0.3, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    [0.3, 1.0, 0.0, 0.7, 0.5, 0.2, 0.9],
    [0.3, 1.0, 0.0, 0.7, 0.0, 0.2, 0.9],
    [0.3, 1.0, 0.0, 0.0, 0.5, 0.2, 0.9],
    [1.0, 1.0, 0.0, 0.0, -1.0, 0.2, 1.0],
    [0.5, 0.0, 0.0, 0.0, 0.0, 0.2, 1.0],
    [0.0, 1.0, 0.0, 0.0, 0.5, 0.7, 0.0],
    [0.3, 0.4, 0.0, 0.0, 0.5, 0.2, 0.0],
    [0.3, 1.0, 0.0, 0.0, 0.0, 0.2, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.7, 0.0],
    [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
];

/// For each class `1..=17`, the first of [`CASE_EXAMPLES`] that lands there.
pub fn representatives() -> Vec<(u8, Option<NormalFormResult>)> {
    let results: Vec<NormalFormResult> = CASE_EXAMPLES
        .iter()
        .filter_map(|x| normalize(x).ok())
        .collect();
    (1..=CLASS_COUNT)
        .map(|c| (c, results.iter().find(|r| r.class_id == c).cloned()))
        .collect()
}

/// Aggregate of a randomized normalizer run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepReport {
    pub samples: usize,
    pub seed: u64,
    pub by_class: BTreeMap<u8, usize>,
    pub by_case: BTreeMap<u8, usize>,
    pub failures: Vec<String>,
    pub max_replay_error: f64,
}

impl SweepReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.failures.is_empty() && self.max_replay_error <= tol
    }
}

/// Random element: even indices draw integers in `-2..=2` (about half of
/// them zero), odd indices draw floats in `[-2, 2]` with some coefficients
/// zeroed.
pub fn sample(seed: u64, i: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    loop {
        let v: Vec<f64> = (0..7)
            .map(|_| {
                if i % 2 == 0 {
                    if rng.random_bool(0.5) {
                        0.0
                    } else {
                        [-2.0, -1.0, 1.0, 2.0][rng.random_range(0..4)]
                    }
                } else if rng.random_bool(0.3) {
                    0.0
                } else {
                    rng.random_range(-2.0..=2.0)
                }
            })
            .collect();
        if v.iter().any(|x| *x != 0.0) {
            return v;
        }
    }
}

pub fn sweep(samples: usize, seed: u64) -> SweepReport {
    let results: Vec<(Vec<f64>, Result<NormalFormResult, AdjointError>)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = sample(seed, i);
            let r = normalize(&x);
            (x, r)
        })
        .collect();
    let mut rep = SweepReport {
        samples,
        seed,
        ..Default::default()
    };
    for (x, r) in results {
        match r {
            Ok(r) => {
                *rep.by_class.entry(r.class_id).or_default() += 1;
                *rep.by_case.entry(r.case.case).or_default() += 1;
                let err = r
                    .replay()
                    .iter()
                    .zip(&r.transformed)
                    .map(|(p, q)| (p - q).abs())
                    .fold(0.0, f64::max);
                rep.max_replay_error = rep.max_replay_error.max(err);
            }
            Err(e) => rep.failures.push(format!("{x:?}: {e}")),
        }
    }
    rep
}
