//! Numeric evaluation of expressions.
//!
//! [`eval_complex`] walks the tree with principal branches so printed
//! formulas with square roots of negative quantities can still be examined.
//! [`Compiled`] is a real-only form with constants folded in, used in the
//! integrator and finite-difference loops.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bessel::{bessel_j, bessel_y};
use super::flow::sample_box;
use super::NumError;
use crate::symcore::{BesselKind, Expr, Func, JetIndex, Node};

/// Base point `(r, q, z, u)`.
pub type Point = [f64; 4];

/// Values for everything an expression may mention.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub point: Point,
    pub constants: BTreeMap<String, f64>,
    pub jets: BTreeMap<JetIndex, f64>,
}

impl Env {
    pub fn new(point: Point, constants: &BTreeMap<String, f64>) -> Env {
        Env {
            point,
            constants: constants.clone(),
            jets: BTreeMap::new(),
        }
    }

    fn symbol(&self, name: &str) -> Result<f64, NumError> {
        match name {
            "r" => Ok(self.point[0]),
            "q" => Ok(self.point[1]),
            "z" => Ok(self.point[2]),
            _ => self
                .constants
                .get(name)
                .copied()
                .ok_or_else(|| NumError::UnboundSymbol(name.to_string())),
        }
    }

    fn jet(&self, j: JetIndex) -> Result<f64, NumError> {
        if j == JetIndex::U {
            return Ok(self.point[3]);
        }
        self.jets
            .get(&j)
            .copied()
            .ok_or_else(|| NumError::UnboundSymbol(format!("u_{}", j.letters())))
    }
}

fn real_part(c: Complex64, what: &str) -> Result<f64, NumError> {
    if c.im.abs() <= 1e-12 * c.re.abs().max(1.0) {
        Ok(c.re)
    } else {
        Err(NumError::Domain(format!("{what} is complex ({c})")))
    }
}

fn bessel(kind: BesselKind, nu: f64, x: f64) -> Result<f64, NumError> {
    match kind {
        BesselKind::J => bessel_j(nu, x),
        BesselKind::Y => bessel_y(nu, x),
    }
}

pub fn eval_complex(e: &Expr, env: &Env) -> Result<Complex64, NumError> {
    Ok(match e.node() {
        Node::Num(q) => Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0),
        Node::Sym(s) => Complex64::new(env.symbol(s)?, 0.0),
        Node::Jet(j) => Complex64::new(env.jet(*j)?, 0.0),
        Node::Unknown(f) => {
            return Err(NumError::UnboundSymbol(format!(
                "{}{}",
                f.name.name(),
                f.letters()
            )))
        }
        Node::Func(f, a) => {
            let a = eval_complex(a, env)?;
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Ln => a.ln(),
                Func::Arctan => a.atan(),
            }
        }
        Node::Bessel(kind, nu, x) => {
            let nu = real_part(eval_complex(nu, env)?, "Bessel order")?;
            let x = real_part(eval_complex(x, env)?, "Bessel argument")?;
            Complex64::new(bessel(*kind, nu, x)?, 0.0)
        }
        Node::Pow(b, p) => {
            let b = eval_complex(b, env)?;
            if p.is_integer() {
                let n = p.to_i32().ok_or_else(|| NumError::Domain(format!("exponent {p}")))?;
                b.powi(n)
            } else {
                let pf = p.to_f64().unwrap_or(f64::NAN);
                if b.im == 0.0 && b.re >= 0.0 {
                    Complex64::new(b.re.powf(pf), 0.0)
                } else {
                    b.powf(pf)
                }
            }
        }
        Node::Mul(fs) => {
            let mut acc = Complex64::new(1.0, 0.0);
            for f in fs {
                acc *= eval_complex(f, env)?;
            }
            acc
        }
        Node::Add(ts) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in ts {
                acc += eval_complex(t, env)?;
            }
            acc
        }
    })
}

/// Real value; a non-negligible imaginary part or a non-finite result is a
/// domain error.
pub fn eval(e: &Expr, env: &Env) -> Result<f64, NumError> {
    let c = eval_complex(e, env)?;
    let v = real_part(c, "expression")?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NumError::Domain(format!("non-finite value {v}")))
    }
}

#[derive(Clone, Debug)]
enum Op {
    Const(f64),
    Var(usize),
    Func(Func, Box<Op>),
    Bessel(BesselKind, Box<Op>, Box<Op>),
    PowI(Box<Op>, i32),
    PowF(Box<Op>, f64),
    Mul(Vec<Op>),
    Add(Vec<Op>),
}

/// Real-valued function of `(r, q, z, u)` with constants bound.
#[derive(Clone, Debug)]
pub struct Compiled(Op);

impl Compiled {
    pub fn new(e: &Expr, constants: &BTreeMap<String, f64>) -> Result<Compiled, NumError> {
        Ok(Compiled(compile(e, constants)?))
    }

    /// NaN signals a domain problem (negative radicand, Bessel error, ...).
    pub fn eval(&self, p: &Point) -> f64 {
        run(&self.0, p)
    }
}

fn compile(e: &Expr, c: &BTreeMap<String, f64>) -> Result<Op, NumError> {
    Ok(match e.node() {
        Node::Num(q) => Op::Const(q.to_f64().unwrap_or(f64::NAN)),
        Node::Sym(s) => match s.as_str() {
            "r" => Op::Var(0),
            "q" => Op::Var(1),
            "z" => Op::Var(2),
            _ => Op::Const(
                *c.get(s)
                    .ok_or_else(|| NumError::UnboundSymbol(s.clone()))?,
            ),
        },
        Node::Jet(j) if *j == JetIndex::U => Op::Var(3),
        Node::Jet(j) => return Err(NumError::UnboundSymbol(format!("u_{}", j.letters()))),
        Node::Unknown(f) => {
            return Err(NumError::UnboundSymbol(format!(
                "{}{}",
                f.name.name(),
                f.letters()
            )))
        }
        Node::Func(f, a) => Op::Func(*f, Box::new(compile(a, c)?)),
        Node::Bessel(k, nu, x) => {
            Op::Bessel(*k, Box::new(compile(nu, c)?), Box::new(compile(x, c)?))
        }
        Node::Pow(b, p) => {
            let b = Box::new(compile(b, c)?);
            match p.to_i32().filter(|_| p.is_integer()) {
                Some(n) => Op::PowI(b, n),
                None => Op::PowF(b, p.to_f64().unwrap_or(f64::NAN)),
            }
        }
        Node::Mul(fs) => Op::Mul(fs.iter().map(|f| compile(f, c)).collect::<Result<_, _>>()?),
        Node::Add(ts) => Op::Add(ts.iter().map(|t| compile(t, c)).collect::<Result<_, _>>()?),
    })
}

fn run(op: &Op, p: &Point) -> f64 {
    match op {
        Op::Const(v) => *v,
        Op::Var(i) => p[*i],
        Op::Func(f, a) => {
            let a = run(a, p);
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Ln => a.ln(),
                Func::Arctan => a.atan(),
            }
        }
        Op::Bessel(k, nu, x) => bessel(*k, run(nu, p), run(x, p)).unwrap_or(f64::NAN),
        Op::PowI(b, n) => run(b, p).powi(*n),
        Op::PowF(b, e) => run(b, p).powf(*e),
        Op::Mul(fs) => fs.iter().map(|f| run(f, p)).product(),
        Op::Add(ts) => ts.iter().map(|t| run(t, p)).sum(),
    }
}

/// `max |e|` at seeded points of the verification box with every jet of
/// order 1 and 2 drawn from `[-1, 1]`.
pub fn max_abs_on_jets(
    e: &Expr,
    constants: &BTreeMap<String, f64>,
    samples: usize,
    seed: u64,
) -> Result<f64, NumError> {
    let jets: Vec<JetIndex> = JetIndex::all_up_to(2)
        .into_iter()
        .filter(|j| *j != JetIndex::U)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for p in sample_box(seed, samples) {
        let mut env = Env::new(p, constants);
        for j in &jets {
            env.jets.insert(*j, rng.random_range(-1.0..=1.0));
        }
        worst = worst.max(eval(e, &env)?.abs());
    }
    Ok(worst)
}
