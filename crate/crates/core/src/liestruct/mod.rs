//! Structure of a finite-dimensional Lie algebra of vector fields:
//! commutators, structure constants, Killing form, derived series and the
//! radical / Levi factor check.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::jetprolong::VectorField;
use crate::linalg::{self, RVec};
use crate::symcore::{Expr, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("[{left}, {right}] is not in the span of the basis; residual field {residual}")]
    NotClosed {
        left: String,
        right: String,
        residual: String,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("basis index {0} out of range")]
    Index(usize),
    #[error("the given vectors do not span a subalgebra: {0}")]
    NotSubalgebra(String),
}

/// `[v, w]` computed coefficient-wise as `v(w_k) - w(v_k)`.
pub fn commutator(v: &VectorField, w: &VectorField) -> VectorField {
    let vc = v.coeffs();
    let wc = w.coeffs();
    VectorField::from_coeffs([0, 1, 2, 3].map(|k| v.apply(wc[k]) - w.apply(vc[k])))
}

/// Monomial-coordinate view of a vector field: component index and the
/// non-numeric part of a term, mapped to its rational coefficient.
fn monomials(v: &VectorField) -> BTreeMap<(usize, Option<Expr>), Rational> {
    let mut out = BTreeMap::new();
    for (k, c) in v.coeffs().iter().enumerate() {
        for t in c.terms() {
            let (coef, rest) = t.split_coeff();
            *out.entry((k, rest)).or_insert_with(Rational::zero) += coef;
        }
    }
    out
}

/// Expresses `f` as a rational combination of `basis`, exactly.
pub fn decompose(f: &VectorField, basis: &[VectorField]) -> Option<RVec> {
    let target = monomials(f);
    let cols: Vec<BTreeMap<_, _>> = basis.iter().map(monomials).collect();
    let mut keys: Vec<_> = target.keys().cloned().collect();
    for c in &cols {
        keys.extend(c.keys().cloned());
    }
    keys.sort();
    keys.dedup();
    let get = |m: &BTreeMap<(usize, Option<Expr>), Rational>, k| {
        m.get(k).cloned().unwrap_or_else(Rational::zero)
    };
    // one equation per monomial, one unknown per basis element
    let a: Vec<RVec> = keys
        .iter()
        .map(|k| cols.iter().map(|c| get(c, k)).collect())
        .collect();
    let b: RVec = keys.iter().map(|k| get(&target, k)).collect();
    if basis.is_empty() {
        return b.iter().all(Zero::is_zero).then(Vec::new);
    }
    linalg::solve(&a, &b)
}

/// Structure constants `c[i][j][k]` with `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    pub names: Vec<String>,
    pub fields: Vec<VectorField>,
    pub c: Vec<Vec<RVec>>,
}

pub fn structure_constants(basis: &[VectorField]) -> Result<LieAlgebra, LieError> {
    structure_constants_named(basis, &default_names(basis.len()))
}

fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

pub fn structure_constants_named(
    basis: &[VectorField],
    names: &[String],
) -> Result<LieAlgebra, LieError> {
    let n = basis.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let solved: Vec<Result<((usize, usize), RVec), LieError>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let br = commutator(&basis[i], &basis[j]);
            decompose(&br, basis)
                .map(|c| ((i, j), c))
                .ok_or_else(|| LieError::NotClosed {
                    left: names[i].clone(),
                    right: names[j].clone(),
                    residual: br.to_string(),
                })
        })
        .collect();
    let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
    for r in solved {
        let ((i, j), v) = r?;
        c[j][i] = v.iter().map(|x| -x).collect();
        c[i][j] = v;
    }
    Ok(LieAlgebra {
        names: names.to_vec(),
        fields: basis.to_vec(),
        c,
    })
}

pub fn unit(n: usize, i: usize) -> RVec {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

fn is_zero_vec(v: &RVec) -> bool {
    v.iter().all(Zero::is_zero)
}

impl LieAlgebra {
    /// An abstract algebra given only by its structure constants.
    pub fn from_constants(c: Vec<Vec<RVec>>) -> LieAlgebra {
        let n = c.len();
        LieAlgebra {
            names: default_names(n),
            fields: Vec::new(),
            c,
        }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    fn check(&self, v: &RVec) -> Result<(), LieError> {
        if v.len() == self.dim() {
            Ok(())
        } else {
            Err(LieError::Dimension {
                expected: self.dim(),
                got: v.len(),
            })
        }
    }

    pub fn bracket(&self, v: &RVec, w: &RVec) -> Result<RVec, LieError> {
        self.check(v)?;
        self.check(w)?;
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if w[j].is_zero() {
                    continue;
                }
                let f = &v[i] * &w[j];
                for (o, c) in out.iter_mut().zip(&self.c[i][j]) {
                    *o += &f * c;
                }
            }
        }
        Ok(out)
    }

    /// `ad(e_i)` with column `j` equal to the coordinates of `[e_i, e_j]`.
    pub fn ad_matrix(&self, i: usize) -> Result<Vec<RVec>, LieError> {
        if i >= self.dim() {
            return Err(LieError::Index(i));
        }
        self.ad(&unit(self.dim(), i))
    }

    pub fn ad(&self, v: &RVec) -> Result<Vec<RVec>, LieError> {
        self.check(v)?;
        let n = self.dim();
        let mut m = vec![vec![Rational::zero(); n]; n];
        for j in 0..n {
            let col = self.bracket(v, &unit(n, j))?;
            for (k, x) in col.into_iter().enumerate() {
                m[k][j] = x;
            }
        }
        Ok(m)
    }

    pub fn killing_form(&self, v: &RVec, w: &RVec) -> Result<Rational, LieError> {
        Ok(linalg::trace(&linalg::mat_mul(&self.ad(v)?, &self.ad(w)?)))
    }

    pub fn killing_gram(&self) -> Vec<RVec> {
        let n = self.dim();
        let ads: Vec<Vec<RVec>> = (0..n).map(|i| self.ad_matrix(i).unwrap()).collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| linalg::trace(&linalg::mat_mul(&ads[i], &ads[j])))
                    .collect()
            })
            .collect()
    }

    pub fn is_semisimple(&self) -> bool {
        self.dim() > 0 && !linalg::determinant(&self.killing_gram()).is_zero()
    }

    /// Reduced basis of `[U, V]` for subspaces given by spanning vectors.
    pub fn bracket_span(&self, u: &[RVec], v: &[RVec]) -> Vec<RVec> {
        let mut rows = Vec::new();
        for a in u {
            for b in v {
                let br = self.bracket(a, b).unwrap();
                if !is_zero_vec(&br) {
                    rows.push(br);
                }
            }
        }
        linalg::rref(&rows).0
    }

    /// `g, g^(1), g^(2), ...` until the series stabilizes (last entry
    /// repeated once is not included).
    pub fn derived_series(&self) -> Vec<Vec<RVec>> {
        let n = self.dim();
        let mut cur: Vec<RVec> = (0..n).map(|i| unit(n, i)).collect();
        let mut out = vec![cur.clone()];
        loop {
            let next = self.bracket_span(&cur, &cur);
            if next.len() == cur.len() {
                break;
            }
            out.push(next.clone());
            if next.is_empty() {
                break;
            }
            cur = next;
        }
        out
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().last().is_some_and(Vec::is_empty)
    }

    /// Structure constants of the subalgebra spanned by `vectors`, in that
    /// basis.
    pub fn subalgebra(&self, vectors: &[RVec]) -> Result<LieAlgebra, LieError> {
        let (red, piv) = linalg::rref(vectors);
        if red.len() != vectors.len() {
            return Err(LieError::NotSubalgebra("vectors are linearly dependent".into()));
        }
        // coordinates with respect to the given vectors, not the reduced ones
        let m = vectors.len();
        let mut c = vec![vec![vec![Rational::zero(); m]; m]; m];
        let transpose: Vec<RVec> = (0..self.dim())
            .map(|k| vectors.iter().map(|v| v[k].clone()).collect())
            .collect();
        for a in 0..m {
            for b in 0..m {
                let br = self.bracket(&vectors[a], &vectors[b])?;
                if linalg::coordinates(&red, &piv, &br).is_none() {
                    return Err(LieError::NotSubalgebra(format!(
                        "[{}, {}] = {} leaves the span",
                        self.describe(&vectors[a]),
                        self.describe(&vectors[b]),
                        self.describe(&br)
                    )));
                }
                c[a][b] = linalg::solve(&transpose, &br).expect("in span");
            }
        }
        Ok(LieAlgebra {
            names: vectors.iter().map(|v| self.describe(v)).collect(),
            fields: Vec::new(),
            c,
        })
    }

    /// Human-readable linear combination of basis names.
    pub fn describe(&self, v: &RVec) -> String {
        let mut s = String::new();
        for (x, name) in v.iter().zip(&self.names) {
            if x.is_zero() {
                continue;
            }
            let mag = x.abs();
            let sign = if x.is_negative() { "-" } else { "+" };
            if s.is_empty() {
                if x.is_negative() {
                    s.push('-');
                }
            } else {
                s.push_str(&format!(" {sign} "));
            }
            if !mag.is_one() {
                s.push_str(&format!("{mag}*"));
            }
            s.push_str(name);
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }

    /// Commutator table with entry `[i][j]` the description of `[e_i, e_j]`.
    pub fn table(&self) -> Vec<Vec<String>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.describe(&self.c[i][j])).collect())
            .collect()
    }

    /// Jacobi identity over all basis triples; returns the first violation.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (ei, ej, ek) = (unit(n, i), unit(n, j), unit(n, k));
                    let t1 = self.bracket(&ei, &self.bracket(&ej, &ek).unwrap()).unwrap();
                    let t2 = self.bracket(&ej, &self.bracket(&ek, &ei).unwrap()).unwrap();
                    let t3 = self.bracket(&ek, &self.bracket(&ei, &ej).unwrap()).unwrap();
                    if (0..n).any(|l| !(&t1[l] + &t2[l] + &t3[l]).is_zero()) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}

/// One assertion of the radical / Levi factor check.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LeviCheck {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LeviReport {
    pub checks: Vec<LeviCheck>,
}

impl LeviReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&LeviCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, witness: Option<String>) -> LeviCheck {
    LeviCheck {
        name: name.into(),
        passed: witness.is_none(),
        witness,
    }
}

/// Whether `[b, e_i]` stays in `span(sub)` for every basis element and every
/// `b` in `sub`; returns a witness bracket otherwise.
fn ideal_witness(g: &LieAlgebra, sub: &[RVec]) -> Option<String> {
    let n = g.dim();
    for b in sub {
        for i in 0..n {
            let br = g.bracket(b, &unit(n, i)).unwrap();
            if !linalg::in_span(sub, &br) {
                return Some(format!(
                    "[{}, {}] = {} is outside the subspace",
                    g.describe(b),
                    g.names[i],
                    g.describe(&br)
                ));
            }
        }
    }
    None
}

/// Matches a 3-dimensional algebra against `[e1,e2] = e3, [e2,e3] = e1,
/// [e3,e1] = e2` after permuting and rescaling the basis by rationals.
pub fn so3_pattern(s: &LieAlgebra) -> Option<String> {
    if s.dim() != 3 {
        return None;
    }
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let multiple = |a: usize, b: usize, target: usize| -> Option<Rational> {
        let v = &s.c[a][b];
        if (0..3).any(|k| k != target && !v[k].is_zero()) || v[target].is_zero() {
            return None;
        }
        Some(v[target].clone())
    };
    for p in PERMS {
        let (i, j, k) = (p[0], p[1], p[2]);
        let (Some(al), Some(be), Some(ga)) =
            (multiple(i, j, k), multiple(j, k, i), multiple(k, i, j))
        else {
            continue;
        };
        // scales l with l_i l_j al = l_k, l_j l_k be = l_i, l_k l_i ga = l_j
        let sq = |x: Rational| -> Option<Rational> {
            if !x.is_positive() {
                return None;
            }
            let n = x.numer().sqrt();
            let d = x.denom().sqrt();
            (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Rational::new(n, d))
        };
        let (Some(li), Some(lj), Some(lk)) = (
            sq((&al * &ga).recip()),
            sq((&al * &be).recip()),
            sq((&be * &ga).recip()),
        ) else {
            continue;
        };
        for signs in 0..8u8 {
            let sg = |b: u8, x: &Rational| if signs & b != 0 { -x } else { x.clone() };
            let (a, b, c) = (sg(1, &li), sg(2, &lj), sg(4, &lk));
            if &a * &b * &al == c && &b * &c * &be == a && &c * &a * &ga == b {
                return Some(format!(
                    "e1 = {}*{}, e2 = {}*{}, e3 = {}*{}",
                    a, s.names[i], b, s.names[j], c, s.names[k]
                ));
            }
        }
    }
    None
}

/// Verifies a proposed radical `r` and Levi factor `s` of `g`.
pub fn verify_levi(g: &LieAlgebra, radical: &[RVec], levi: &[RVec]) -> LeviReport {
    let mut checks = Vec::new();
    checks.push(check("radical is an ideal", ideal_witness(g, radical)));

    let r_alg = g.subalgebra(radical);
    checks.push(check(
        "radical is solvable",
        match &r_alg {
            Ok(r) if r.is_solvable() => None,
            Ok(r) => Some(format!(
                "derived series stalls at dimension {}",
                r.derived_series().last().map_or(0, Vec::len)
            )),
            Err(e) => Some(e.to_string()),
        },
    ));
    let mut abelian = None;
    'outer: for a in radical {
        for b in radical {
            let br = g.bracket(a, b).unwrap();
            if !is_zero_vec(&br) {
                abelian = Some(format!(
                    "[{}, {}] = {}",
                    g.describe(a),
                    g.describe(b),
                    g.describe(&br)
                ));
                break 'outer;
            }
        }
    }
    checks.push(check("radical is abelian", abelian));

    let s_alg = g.subalgebra(levi);
    checks.push(check(
        "levi factor is a subalgebra",
        s_alg.as_ref().err().map(ToString::to_string),
    ));
    checks.push(check(
        "levi factor is semisimple",
        match &s_alg {
            Ok(s) if s.is_semisimple() => None,
            Ok(_) => Some("Killing form of the subalgebra is degenerate".into()),
            Err(e) => Some(e.to_string()),
        },
    ));
    let mut both = radical.to_vec();
    both.extend(levi.iter().cloned());
    let rank = linalg::rank(&both);
    checks.push(check(
        "radical + levi factor = whole algebra (direct sum)",
        (rank != g.dim() || both.len() != g.dim()).then(|| {
            format!(
                "rank {} from {} vectors in dimension {}",
                rank,
                both.len(),
                g.dim()
            )
        }),
    ));
    checks.push(check(
        "levi factor is not an ideal",
        ideal_witness(g, levi)
            .is_none()
            .then(|| "every bracket with the levi factor stays inside it".to_string()),
    ));
    checks.push(check(
        "levi factor matches so(3)",
        match &s_alg {
            Ok(s) => so3_pattern(s)
                .is_none()
                .then(|| "no permutation and rescaling gives the cyclic pattern".to_string()),
            Err(e) => Some(e.to_string()),
        },
    ));
    LeviReport { checks }
}

/// Machine-readable summary of the structure analysis.
#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub table: Vec<Vec<String>>,
    pub killing_gram: Vec<Vec<String>>,
    pub derived_series_dims: Vec<usize>,
    pub solvable: bool,
    pub semisimple: bool,
    pub levi: Option<LeviReport>,
}

pub fn structure_report(g: &LieAlgebra, levi: Option<LeviReport>) -> StructureReport {
    StructureReport {
        table: g.table(),
        killing_gram: g
            .killing_gram()
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect(),
        derived_series_dims: g.derived_series().iter().map(Vec::len).collect(),
        solvable: g.is_solvable(),
        semisimple: g.is_semisimple(),
        levi,
    }
}

#[cfg(test)]
mod tests;
