//! Bessel functions of real order and real argument.
//!
//! Ascending series for `|x| <= 12`, Hankel asymptotics beyond. `Y` of
//! integer order uses the logarithmic series for orders 0 and 1 and the
//! upward recurrence; non-integer orders go through `J_nu` and `J_-nu`.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::NumError;

const SERIES_LIMIT: f64 = 12.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn as_integer(nu: f64) -> Option<i64> {
    let n = nu.round();
    ((nu - n).abs() < 1e-12).then_some(n as i64)
}

fn sign(n: i64) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn j_series(nu: f64, x: f64) -> f64 {
    let h = x / 2.0;
    let mut term = h.powf(nu) / gamma(nu + 1.0);
    let mut sum = term;
    let q = -h * h;
    for m in 1..500 {
        let m = m as f64;
        term *= q / (m * (m + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && m > h {
            break;
        }
    }
    sum
}

/// `(P, Q)` of the Hankel expansion, summed while terms decrease.
fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (0.0, 0.0);
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..200 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        if a.abs() > last {
            break;
        }
        last = a.abs();
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn j_asym(nu: f64, x: f64) -> f64 {
    let (p, q) = hankel_pq(nu, x);
    let w = x - (nu / 2.0 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * w.cos() - q * w.sin())
}

fn y_asym(nu: f64, x: f64) -> f64 {
    let (p, q) = hankel_pq(nu, x);
    let w = x - (nu / 2.0 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * w.sin() + q * w.cos())
}

pub fn bessel_j(nu: f64, x: f64) -> Result<f64, NumError> {
    if !nu.is_finite() || !x.is_finite() {
        return Err(NumError::Domain(format!("BesselJ({nu}, {x})")));
    }
    if let Some(n) = as_integer(nu) {
        if n < 0 {
            return Ok(sign(n) * bessel_j(-nu, x)?);
        }
        if x < 0.0 {
            return Ok(sign(n) * bessel_j(nu, -x)?);
        }
    } else if x < 0.0 {
        return Err(NumError::Domain(format!(
            "BesselJ of non-integer order {nu} at negative argument {x}"
        )));
    }
    if x == 0.0 {
        return match nu {
            n if n == 0.0 => Ok(1.0),
            n if n > 0.0 => Ok(0.0),
            _ => Err(NumError::Domain(format!("BesselJ({nu}, 0) is unbounded"))),
        };
    }
    Ok(if x <= SERIES_LIMIT {
        j_series(nu, x)
    } else {
        j_asym(nu, x)
    })
}

fn harmonic(n: u32) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

fn y0_series(x: f64) -> f64 {
    let h2 = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 0.0;
    for m in 1..500u32 {
        term *= -h2 / (m as f64 * m as f64);
        let t = -term * harmonic(m);
        sum += t;
        if t.abs() <= 1e-17 * sum.abs() && m as f64 > x {
            break;
        }
    }
    2.0 / PI * (((x / 2.0).ln() + EULER_GAMMA) * j_series(0.0, x) + sum)
}

fn y1_series(x: f64) -> f64 {
    let h = x / 2.0;
    let mut term = h;
    let mut sum = 0.0;
    for m in 0..500u32 {
        if m > 0 {
            term *= -h * h / (m as f64 * (m + 1) as f64);
        }
        let psi = -2.0 * EULER_GAMMA + harmonic(m) + harmonic(m + 1);
        let t = term * psi;
        sum += t;
        if m > 0 && t.abs() <= 1e-17 * sum.abs() && m as f64 > x {
            break;
        }
    }
    -2.0 / (PI * x) + 2.0 / PI * h.ln() * j_series(1.0, x) - sum / PI
}

pub fn bessel_y(nu: f64, x: f64) -> Result<f64, NumError> {
    if !nu.is_finite() || !x.is_finite() || x <= 0.0 {
        return Err(NumError::Domain(format!("BesselY({nu}, {x}) needs x > 0")));
    }
    if x > SERIES_LIMIT {
        return Ok(y_asym(nu, x));
    }
    match as_integer(nu) {
        Some(n) if n < 0 => Ok(sign(n) * bessel_y(-nu, x)?),
        Some(n) => {
            let (mut a, mut b) = (y0_series(x), y1_series(x));
            if n == 0 {
                return Ok(a);
            }
            for k in 1..n {
                let next = 2.0 * k as f64 / x * b - a;
                a = b;
                b = next;
            }
            Ok(b)
        }
        None => {
            let s = (nu * PI).sin();
            Ok((j_series(nu, x) * (nu * PI).cos() - j_series(-nu, x)) / s)
        }
    }
}
