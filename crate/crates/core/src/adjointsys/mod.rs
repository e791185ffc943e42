//! Adjoint representation of a Lie algebra given by structure constants.
//!
//! `M_i(s)` is laid out row-wise: row `j` holds the coordinates of
//! `Ad(exp(s X_i)) X_j = X_j - s [X_i, X_j] + s^2/2 [X_i, [X_i, X_j]] - ...`,
//! so `M_i(s) = exp(-s ad(X_i))^T` and a coefficient row vector transforms
//! as `a' = a M_i(s)`.

mod normal;

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::liestruct::LieAlgebra;
use crate::linalg::{self, RVec};
use crate::symcore::{parse_with, rat, Expr, SymbolTable};

pub use normal::{
    class_label, class_pattern, normalize, normalize_exact, representatives, select_case,
    sample, sweep, CaseInfo, NormalFormResult, Step, SweepReport, ZeroFlags, CASE_EXAMPLES,
    CLASS_COUNT,
};

pub type Mat = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdjointError {
    #[error("basis index {0} out of range")]
    Index(usize),
    #[error("ad(X{0}) is neither nilpotent of order 3 nor a rotation generator")]
    NoClosedForm(usize),
    #[error("expected {expected} coefficients, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("the zero element has no normal form")]
    DegenerateInput,
    #[error(
        "case {case} did not reach the pattern of class {class}: off-pattern residual {residual:e}"
    )]
    ToleranceFailure {
        case: u8,
        class: u8,
        residual: f64,
        transformed: Vec<f64>,
    },
}

fn to_f64(m: &[RVec]) -> Mat {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
        .collect()
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let n = a.first().map_or(0, Vec::len);
    (0..n).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn determinant(a: &Mat) -> f64 {
    let mut m = a.clone();
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
            .unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for k in c..n {
                m[i][k] -= f * m[c][k];
            }
        }
    }
    det
}

/// Closed form of `exp(-s A)` for `A = ad(X_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClosedForm {
    /// `A^3 = 0`: `I - s A + s^2/2 A^2`.
    Polynomial,
    /// `A^3 = -A`: `I - sin(s) A + (1 - cos s) A^2`.
    Trigonometric,
}

/// `M_i(s)` for one generator, with both evaluation routes.
#[derive(Clone, Debug)]
pub struct AdjointMatrix {
    pub generator: usize,
    pub ad: Vec<RVec>,
    ad2: Vec<RVec>,
    pub form: ClosedForm,
}

impl AdjointMatrix {
    pub fn new(g: &LieAlgebra, i: usize) -> Result<AdjointMatrix, AdjointError> {
        let ad = g.ad_matrix(i).map_err(|_| AdjointError::Index(i))?;
        let ad2 = linalg::mat_mul(&ad, &ad);
        let ad3 = linalg::mat_mul(&ad2, &ad);
        let form = if ad3.iter().flatten().all(Zero::is_zero) {
            ClosedForm::Polynomial
        } else if ad3.iter().flatten().zip(ad.iter().flatten()).all(|(x, y)| *x == -y) {
            ClosedForm::Trigonometric
        } else {
            return Err(AdjointError::NoClosedForm(i + 1));
        };
        Ok(AdjointMatrix {
            generator: i,
            ad,
            ad2,
            form,
        })
    }

    pub fn dim(&self) -> usize {
        self.ad.len()
    }

    /// Scalar weights `(w1, w2)` with `exp(-sA) = I + w1 A + w2 A^2`.
    fn weights(&self, s: f64) -> (f64, f64) {
        match self.form {
            ClosedForm::Polynomial => (-s, s * s / 2.0),
            ClosedForm::Trigonometric => (-s.sin(), 1.0 - s.cos()),
        }
    }

    /// Row layout `M[j][k]`, from the closed form.
    pub fn eval(&self, s: f64) -> Mat {
        let (w1, w2) = self.weights(s);
        let n = self.dim();
        let a = to_f64(&self.ad);
        let a2 = to_f64(&self.ad2);
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let id = if j == k { 1.0 } else { 0.0 };
                        id + w1 * a[k][j] + w2 * a2[k][j]
                    })
                    .collect()
            })
            .collect()
    }

    /// Truncated series `sum_{m < terms} (-sA)^m / m!` (row layout) and a
    /// bound on the neglected tail in the max-entry norm.
    pub fn series(&self, s: f64, terms: usize) -> (Mat, f64) {
        let n = self.dim();
        let a = to_f64(&self.ad);
        let norm = a
            .iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let step: Mat = a
            .iter()
            .map(|r| r.iter().map(|x| -s * x).collect())
            .collect();
        let mut sum = identity(n);
        let mut term = identity(n);
        for m in 1..terms {
            term = mat_mul(&term, &step);
            for row in term.iter_mut() {
                for x in row.iter_mut() {
                    *x /= m as f64;
                }
            }
            for (srow, trow) in sum.iter_mut().zip(&term) {
                for (x, t) in srow.iter_mut().zip(trow) {
                    *x += t;
                }
            }
        }
        // |sum_{m >= N} (sA)^m/m!| <= (|s| |A|)^N / N! * exp(|s| |A|)
        let x = s.abs() * norm;
        let mut bound = x.exp();
        for m in 1..=terms {
            bound *= x / m as f64;
        }
        (transpose(&sum), bound)
    }

    /// Entries as expressions in the symbol `s`.
    pub fn symbolic(&self) -> Vec<Vec<Expr>> {
        let s = Expr::sym("s");
        let (w1, w2) = match self.form {
            ClosedForm::Polynomial => (-&s, Expr::rational(rat(1, 2)) * s.powi(2)),
            ClosedForm::Trigonometric => (-s.sin(), Expr::one() - s.cos()),
        };
        let n = self.dim();
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let id = if j == k { Expr::one() } else { Expr::zero() };
                        id + &w1 * &Expr::rational(self.ad[k][j].clone())
                            + &w2 * &Expr::rational(self.ad2[k][j].clone())
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn adjoint_matrices(g: &LieAlgebra) -> Result<Vec<AdjointMatrix>, AdjointError> {
    (0..g.dim()).map(|i| AdjointMatrix::new(g, i)).collect()
}

/// Applies `(generator index, s)` pairs left to right: `a <- a M_i(s)`.
pub fn adjoint_apply(
    mats: &[AdjointMatrix],
    transcript: &[(usize, f64)],
    a: &[f64],
) -> Result<Vec<f64>, AdjointError> {
    let n = mats.len();
    if a.len() != n {
        return Err(AdjointError::Dimension {
            expected: n,
            got: a.len(),
        });
    }
    let mut v = a.to_vec();
    for &(i, s) in transcript {
        let m = mats.get(i).ok_or(AdjointError::Index(i))?.eval(s);
        v = (0..n).map(|k| (0..n).map(|j| v[j] * m[j][k]).sum()).collect();
    }
    Ok(v)
}

/// Float bracket through the structure constants.
pub fn bracket_f64(g: &LieAlgebra, v: &[f64], w: &[f64]) -> Vec<f64> {
    let n = g.dim();
    let mut out = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let f = v[i] * w[j];
            if f == 0.0 {
                continue;
            }
            for (o, c) in out.iter_mut().zip(&g.c[i][j]) {
                *o += f * c.to_f64().unwrap_or(f64::NAN);
            }
        }
    }
    out
}

pub fn killing_f64(g: &LieAlgebra, v: &[f64], w: &[f64]) -> f64 {
    let gram = to_f64(&g.killing_gram());
    v.iter()
        .enumerate()
        .map(|(i, x)| w.iter().enumerate().map(|(j, y)| x * gram[i][j] * y).sum::<f64>())
        .sum()
}

/// One entry where a printed matrix differs from the computed one.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EntryMismatch {
    pub row: usize,
    pub col: usize,
    pub printed: String,
    pub computed: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AdjointComparison {
    pub generator: usize,
    pub mismatches: Vec<EntryMismatch>,
}

/// Compares computed matrices with printed ones (text in the expression
/// grammar, symbol `s`), exactly after canonicalization. Indices in the
/// report are 1-based.
pub fn compare_printed(
    mats: &[AdjointMatrix],
    printed: &[[[&str; 7]; 7]],
    table: &SymbolTable,
) -> Vec<AdjointComparison> {
    mats.iter()
        .zip(printed)
        .map(|(m, p)| {
            let sym = m.symbolic();
            let mut mismatches = Vec::new();
            for (j, row) in p.iter().enumerate() {
                for (k, text) in row.iter().enumerate() {
                    let agrees = parse_with(text, table).is_ok_and(|e| e == sym[j][k]);
                    if !agrees {
                        mismatches.push(EntryMismatch {
                            row: j + 1,
                            col: k + 1,
                            printed: text.to_string(),
                            computed: sym[j][k].to_string(),
                        });
                    }
                }
            }
            AdjointComparison {
                generator: m.generator + 1,
                mismatches,
            }
        })
        .collect()
}
