//! Numeric checks: expression evaluation with Bessel functions, RK4 flows
//! of the generators, transport of solutions along those flows, and
//! directional derivatives of candidate invariants.
//!
//! Points are `[r, q, z, u]`.

mod bessel;
mod eval;
mod flow;
mod invariant;
mod suite;
mod transport;

use thiserror::Error;

use crate::jetprolong::JetError;
use crate::symcore::SymError;

pub use bessel::{bessel_j, bessel_y};
pub use eval::{eval, eval_complex, max_abs_on_jets, Compiled, Env, Point};
pub use flow::{
    check_group_law, eval_printed_flow, flow_endpoint, integrate_flow, point_distance, sample_box,
    steps_for, sup_diff, translate_polar, verify_closed_form, wrap_angle, ClosedFormCheck,
    CompiledField, FlowResult, MIN_R, STEPS_PER_UNIT,
};
pub use invariant::{
    check_invariant, check_invariant_on_domain, directional_derivative, DomainCheck, InvariantDef,
    Status,
};
pub use suite::{
    rk4_exponent, verify_flows, verify_invariants, verify_transport, ClosedFormReport, FlowSuite,
    GroupLawReport, InvariantReport, InvariantSuite, OracleReport, TransportReport,
    TransportSuite, CLOSED_FORM_TOL, GROUP_TOL, I1_TOL, I2_TOL, I3_TOL, POST_TOL, PRE_TOL,
};
pub use transport::{
    fd_residual, formula_residual, residual_expr, symbolic_residual, transport_solution, Fixture,
    Transported, H1, H2, TRANSPORT_STEPS_PER_UNIT,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("trajectory reached r = {r:e} at s = {s}")]
    SingularityApproach { s: f64, r: f64 },
    #[error("printed g{flow} component {component} is complex ({value})")]
    FormulaDomain {
        flow: usize,
        component: usize,
        value: String,
    },
    #[error("at least one integration step is required")]
    InvalidSteps,
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[cfg(test)]
mod tests;
