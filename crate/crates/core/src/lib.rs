//! Lie point-symmetry analysis of scalar second-order PDEs in three
//! independent variables, with the cylindrical Helmholtz equation as the
//! built-in reference problem.

pub mod symcore;

pub mod che;
pub mod jetprolong;
pub mod liestruct;
pub mod linalg;
pub mod adjointsys;
pub mod numverify;
