//! Sparse storage, the spectral sector solver and preconditioned CG.

mod csr;
mod pcg;
mod spectral;

pub use csr::CsrMatrix;
pub use pcg::{solve_shifted, LinearSolveStats, Preconditioner};
pub use spectral::{solve_tridiagonal, SpectralSolver};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("linear solve stopped after {iterations} iterations at relative residual {relative_residual:.3e}")]
    NotConverged { iterations: usize, relative_residual: f64 },
    #[error("conjugate gradient breakdown after {iterations} iterations (operator not positive definite)")]
    Breakdown { iterations: usize },
}
