//! Chance-constrained AC optimal power flow via polynomial chaos expansion.
//!
//! The crate builds orthogonal polynomial bases and Galerkin scalar-product
//! tensors over a stochastic germ, projects the rectangular AC power flow
//! equations onto the basis, assembles the resulting nonlinear program with
//! moment-reformulated chance constraints, solves it with an interior-point
//! method under constraint generation, and validates the resulting
//! generation policies by Monte Carlo against full and linearized AC power
//! flow.

pub mod grid;
pub mod linalg;
pub mod opf;
pub mod pce;
pub mod powerflow;
pub mod validation;
