use std::fmt;

use serde::Serialize;

use super::JetError;
use crate::symcore::{differentiate, Coord, Expr, Rational, Var};

/// A point-symmetry generator `xi1 d_r + xi2 d_q + xi3 d_z + eta d_u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorField {
    pub xi: [Expr; 3],
    pub eta: Expr,
}

impl VectorField {
    /// Builds a field, rejecting coefficients that mention derivatives of u.
    pub fn new(xi1: Expr, xi2: Expr, xi3: Expr, eta: Expr) -> Result<Self, JetError> {
        for (name, e) in [("xi1", &xi1), ("xi2", &xi2), ("xi3", &xi3), ("eta", &eta)] {
            if e.jets().iter().any(|j| j.order() > 0) {
                return Err(JetError::JetInCoefficient(name));
            }
        }
        Ok(VectorField {
            xi: [xi1, xi2, xi3],
            eta,
        })
    }

    pub fn zero() -> Self {
        VectorField {
            xi: [Expr::zero(), Expr::zero(), Expr::zero()],
            eta: Expr::zero(),
        }
    }

    /// Coefficients in the order r, q, z, u.
    pub fn coeffs(&self) -> [&Expr; 4] {
        [&self.xi[0], &self.xi[1], &self.xi[2], &self.eta]
    }

    pub fn from_coeffs(c: [Expr; 4]) -> Self {
        let [a, b, d, e] = c;
        VectorField {
            xi: [a, b, d],
            eta: e,
        }
    }

    pub fn base_vars() -> [Var; 4] {
        [Coord::R.var(), Coord::Theta.var(), Coord::Z.var(), Var::u()]
    }

    /// First-order action `v(f)` on a function of the base variables.
    pub fn apply(&self, f: &Expr) -> Expr {
        let vars = Self::base_vars();
        Expr::add(self.coeffs().iter().zip(&vars).filter(|(c, _)| !c.is_zero()).map(
            |(c, v)| (*c) * &differentiate(f, v).expect("base variables are never Bessel orders"),
        ))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let k = Expr::rational(c.clone());
        VectorField::from_coeffs(self.coeffs().map(|e| &k * e))
    }

    pub fn plus(&self, other: &Self) -> Self {
        let a = self.coeffs();
        let b = other.coeffs();
        VectorField::from_coeffs([0, 1, 2, 3].map(|i| a[i] + b[i]))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_zero())
    }

    /// `sum_i c_i v_i`.
    pub fn combination(coeffs: &[Rational], fields: &[VectorField]) -> Self {
        coeffs
            .iter()
            .zip(fields)
            .fold(VectorField::zero(), |acc, (c, v)| acc.plus(&v.scale(c)))
    }

    pub fn report(&self) -> FieldText {
        FieldText {
            xi1: self.xi[0].to_string(),
            xi2: self.xi[1].to_string(),
            xi3: self.xi[2].to_string(),
            eta: self.eta.to_string(),
        }
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["d_r", "d_q", "d_z", "d_u"];
        let mut first = true;
        for (c, n) in self.coeffs().iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{n}")?;
            } else {
                write!(f, "({c})*{n}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Printable coefficients, as they appear in field files.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FieldText {
    pub xi1: String,
    pub xi2: String,
    pub xi3: String,
    pub eta: String,
}
