//! Galerkin-projected optimal power flow: the nonlinear program over PCE
//! coefficients, its interior-point solver, and constraint generation.

mod congen;
mod ipm;
mod moments;
mod nlp;
mod policy;
mod projection;
mod risk;
mod solution;

pub use congen::{constraint_generation, solve_deterministic, CongenReport};
pub use ipm::{IpmOptions, IpmStatus};
pub use moments::{scalar_moments, solution_moments, squared_magnitude_moments, SolutionMoments};
pub use nlp::{assemble_nlp, ChanceSide, NlpProblem, NlpSettings, QuantityId, WorkingSet};
pub use policy::evaluate_policy;
pub use projection::{GalerkinSystem, Target, VoltageCoeffs};
pub use risk::{lambda_of_epsilon, LambdaRule, RiskConfig};
pub use solution::{PceSolution, SolveTrace, SolverStatus};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OpfError {
    #[error("risk configuration: {0}")]
    Risk(String),
    #[error("nlp assembly: {0}")]
    Assembly(String),
    #[error(transparent)]
    Grid(#[from] crate::grid::GridError),
    #[error(transparent)]
    Pce(#[from] crate::pce::PceError),
    #[error("solver failed: {status:?} after {iterations} iterations (kkt {kkt_error:.3e}, feas {feasibility:.3e})")]
    Solver {
        status: IpmStatus,
        iterations: usize,
        kkt_error: f64,
        feasibility: f64,
    },
    #[error("constraint generation did not settle within {rounds} rounds")]
    CongenCycling { rounds: usize },
}
