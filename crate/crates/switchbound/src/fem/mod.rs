//! Finite-element discretization of the controlled heat equation.

mod adjoint;
mod assemble;
pub mod band;
mod grid;
mod instance;
mod mesh;
mod reduced;
mod state;

pub use adjoint::reduced_gradient;
pub use assemble::{assemble_fem, assemble_load, FemMatrices};
pub use grid::TimeGrid;
pub use instance::{Instance, ProblemSetup, ScalarField, SpaceTimeField};
pub use mesh::SpaceMesh;
pub use reduced::{assemble_reduced_quadratic, ReducedQuadratic};
pub use state::{evaluate_fine, objective, solve_state, ControlVector, Trajectory};

use std::fmt;

/// Relative residual bound for the time-step linear solves.
pub const LINEAR_SOLVE_TOL: f64 = 1e-10;

/// Largest `n * m` for which the dense reduced Hessian is assembled.
pub const DENSE_QUADRATIC_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub enum FemError {
    InvalidParameter {
        field: &'static str,
        message: String,
    },
    /// Control dimensioned differently from the instance's `n x m`.
    ControlDimension {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// A time-step linear solve missed the residual target.
    SolveResidual {
        residual: f64,
        tolerance: f64,
    },
    /// The step matrix was not positive definite (should not happen for a
    /// well-formed mesh and positive `dt`).
    NotPositiveDefinite {
        pivot: f64,
    },
    /// `n * m` exceeds the dense-Hessian guard.
    DenseSizeGuard {
        size: usize,
        cap: usize,
    },
    /// Fine time grid does not refine the coarse one by replication.
    RefinementMismatch {
        m: usize,
        m_fine: usize,
    },
}

impl fmt::Display for FemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FemError::InvalidParameter { field, message } => {
                write!(f, "invalid {field}: {message}")
            }
            FemError::ControlDimension { expected, got } => write!(
                f,
                "control dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            FemError::SolveResidual {
                residual,
                tolerance,
            } => write!(
                f,
                "linear solve residual {residual:.3e} exceeds tolerance {tolerance:.3e}"
            ),
            FemError::NotPositiveDefinite { pivot } => {
                write!(f, "step matrix not positive definite (pivot {pivot:.3e})")
            }
            FemError::DenseSizeGuard { size, cap } => {
                write!(f, "dense quadratic guard: n*m = {size} exceeds cap {cap}")
            }
            FemError::RefinementMismatch { m, m_fine } => write!(
                f,
                "fine grid must replicate the coarse one: {m} does not divide {m_fine}"
            ),
        }
    }
}

impl std::error::Error for FemError {}
