//! Exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::symcore::Rational;

pub type RVec = Vec<Rational>;

/// Reduced row-echelon form; returns the nonzero rows and pivot columns.
pub fn rref(rows: &[RVec]) -> (Vec<RVec>, Vec<usize>) {
    let mut m: Vec<RVec> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..ncols {
        let Some(p) = (top..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(top, p);
        let inv = Rational::one() / &m[top][col];
        for x in m[top].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[top].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != top && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        top += 1;
        if top == m.len() {
            break;
        }
    }
    m.truncate(top);
    (m, pivots)
}

pub fn rank(rows: &[RVec]) -> usize {
    rref(rows).1.len()
}

/// Whether `v` lies in the row span of `basis` (which need not be reduced).
pub fn in_span(basis: &[RVec], v: &RVec) -> bool {
    if v.iter().all(Zero::is_zero) {
        return true;
    }
    let r0 = rank(basis);
    let mut ext = basis.to_vec();
    ext.push(v.clone());
    rank(&ext) == r0
}

/// Coordinates of `v` in a reduced basis produced by [`rref`], if it lies in
/// the span.
pub fn coordinates(reduced: &[RVec], pivots: &[usize], v: &RVec) -> Option<RVec> {
    let coords: RVec = pivots.iter().map(|&p| v[p].clone()).collect();
    let mut back = vec![Rational::zero(); v.len()];
    for (c, row) in coords.iter().zip(reduced) {
        for (b, x) in back.iter_mut().zip(row) {
            *b += c * x;
        }
    }
    (back == *v).then_some(coords)
}

/// Solves `a x = b` for square or overdetermined `a` given as rows; returns
/// `None` when inconsistent or underdetermined.
pub fn solve(a: &[RVec], b: &RVec) -> Option<RVec> {
    let n = a.first().map_or(0, |r| r.len());
    let aug: Vec<RVec> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (red, piv) = rref(&aug);
    if piv.contains(&n) || piv.len() < n {
        return None;
    }
    Some(red.iter().map(|r| r[n].clone()).collect())
}

pub fn determinant(m: &[RVec]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= &a[col][col];
        let pivot = a[col].clone();
        for row in a.iter_mut().skip(col + 1) {
            if !row[col].is_zero() {
                let f = &row[col] / &pivot[col];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    det
}

pub fn mat_mul(a: &[RVec], b: &[RVec]) -> Vec<RVec> {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(Rational::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

pub fn trace(a: &[RVec]) -> Rational {
    a.iter()
        .enumerate()
        .fold(Rational::zero(), |acc, (i, r)| acc + &r[i])
}
