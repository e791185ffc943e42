//! Second-order jet machinery: total derivatives, prolongation, the
//! invariance condition and extraction of determining equations.

mod detsys;
mod field;
pub mod files;
mod prolong;

use thiserror::Error;

use crate::symcore::SymError;

pub use detsys::{
    collect_jet_monomials, determining_system, generic_field, implied_by, instantiate,
    normalize_equation, DetEquation, Implication,
};
pub use field::{FieldText, VectorField};
pub use prolong::{
    characteristic, invariance_residual, prolong2, total_derivative, Pde, ProlongedField,
    MAX_ORDER,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("jet order overflow: {jet} exceeds order {max}")]
    OrderOverflow { jet: String, max: u32 },
    #[error("coefficient `{0}` depends on derivatives of u")]
    JetInCoefficient(&'static str),
    #[error("equation is not affine in {0} with a single-term coefficient")]
    NotAffine(String),
    #[error("{0} cannot be the leading derivative")]
    BadLeading(String),
    #[error(transparent)]
    Sym(#[from] SymError),
}

#[cfg(test)]
mod tests;
