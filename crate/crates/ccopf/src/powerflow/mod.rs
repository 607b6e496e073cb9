//! Deterministic rectangular AC power flow: residual evaluation, Newton
//! solves for validation references, and first-order sensitivities for the
//! linearized comparison method.

mod model;

pub use model::{
    BusSpec, IndependentAssignment, LinearizedMap, NewtonOptions, OperatingPoint, PowerFlowModel,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PowerFlowError {
    #[error("newton did not converge in {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        /// Last iterate, for diagnostics.
        iterate: Box<OperatingPoint>,
    },
    #[error("singular power flow jacobian: {0}")]
    SingularJacobian(#[from] crate::linalg::LuError),
    #[error("assignment does not cover every bus exactly once")]
    BadAssignment,
}
