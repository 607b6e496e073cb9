//! Orthogonal polynomial bases, Gauss quadrature, and the scalar-product
//! tensors used by the Galerkin-projected power flow.

mod germ;
mod multivariate;
mod quadrature;
mod square;
mod tensors;
mod univariate;

pub use germ::GermComponent;
pub use multivariate::{MultiIndex, MultivariateBasis};
pub use quadrature::gauss_rule;
pub use square::SquareExpansion;
pub use tensors::{compute_tensors, GalerkinTensors};
pub use univariate::{build_univariate, UnivariateBasis};

use crate::linalg::TridiagError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PceError {
    #[error("invalid germ component: {0}")]
    InvalidComponent(String),
    #[error("germ dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("quadrature rule needs at least one node")]
    EmptyRule,
    #[error(transparent)]
    Quadrature(#[from] TridiagError),
}
