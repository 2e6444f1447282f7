//! Convex relaxation solvers: the box+total-variation master, the
//! cutting-plane loop over alternating inequalities, and Frank–Wolfe bounds
//! over the projected switching hulls.

mod cutting;
mod frank_wolfe;
mod naive;
mod qp;

pub use cutting::{tailored_bound, tailored_relaxation, CutIteration, CUT_STALL_RELATIVE};
pub use frank_wolfe::{frank_wolfe_bound, frank_wolfe_bound_for, FwOptions};
pub use naive::{naive_bound, naive_relaxation};
pub use qp::{solve_qp, solve_qp_warm, LinearRow, QpSolution, QuadraticModel, WarmStart, QP_MAX_ITER};

use crate::fem::FemError;
use crate::switching::{BinaryPattern, SwitchError};
use std::fmt;

/// How a relaxation run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Master solved to optimality (single-solve methods).
    Optimal,
    /// Cut loop found no violated inequality: the bound is exact over the
    /// projected hull.
    ExactSeparation,
    /// Cut loop stalled (relative change below threshold three times).
    Stalled,
    /// Iteration cap hit; the bound is still certified.
    IterationCap,
}

/// Outcome of one lower-bound computation.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub method: &'static str,
    pub lower_bound: f64,
    /// Exact objective of the rounded incumbent pattern, when one exists.
    pub incumbent_value: Option<f64>,
    pub incumbent: Option<BinaryPattern>,
    /// Final relaxed point (flattened control).
    pub relaxed_solution: Vec<f64>,
    pub cuts_added: usize,
    /// First cut count at which the bound reached the naive bound.
    pub cuts_to_exceed_naive: Option<usize>,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub converged: bool,
    pub termination: Termination,
    /// Per-master history of the cut loop (empty for other methods).
    pub history: Vec<CutIteration>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RelaxError {
    /// The model's known feasible point is not feasible.
    InfeasibleStart { violation: f64 },
    /// Unbounded descent ray (cannot happen inside the box).
    Unbounded,
    IterationCap { residual: f64 },
    KktResidual { residual: f64, tol: f64 },
    /// Cut loop bound decreased; masters only gain constraints.
    NonMonotone { previous: f64, current: f64 },
    /// Method requires a bounded-switching constraint.
    WrongConstraint { method: &'static str },
    Fem(FemError),
    Switch(SwitchError),
}

impl fmt::Display for RelaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelaxError::InfeasibleStart { violation } => {
                write!(f, "model feasible point violates constraints by {violation:.3e}")
            }
            RelaxError::Unbounded => write!(f, "descent ray escapes the feasible set"),
            RelaxError::IterationCap { residual } => {
                write!(f, "QP iteration cap reached, best residual {residual:.3e}")
            }
            RelaxError::KktResidual { residual, tol } => {
                write!(f, "KKT residual {residual:.3e} above tolerance {tol:.3e}")
            }
            RelaxError::NonMonotone { previous, current } => write!(
                f,
                "cut-loop bound decreased from {previous} to {current}"
            ),
            RelaxError::WrongConstraint { method } => {
                write!(f, "{method} requires a bounded-switching constraint")
            }
            RelaxError::Fem(e) => write!(f, "{e}"),
            RelaxError::Switch(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RelaxError {}

impl From<FemError> for RelaxError {
    fn from(e: FemError) -> Self {
        RelaxError::Fem(e)
    }
}

impl From<SwitchError> for RelaxError {
    fn from(e: SwitchError) -> Self {
        RelaxError::Switch(e)
    }
}
