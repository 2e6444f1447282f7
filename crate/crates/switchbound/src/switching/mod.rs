//! Combinatorial switching constraints: feasibility, exact linear
//! minimization, pattern enumeration, and cutting-plane separation for the
//! projected switching polytopes.

mod constraint;
mod dwell;
mod enumerate;
mod lmo;
mod separation;

pub use constraint::{feasible, BinaryPattern, BoundedSwitchings, SwitchingConstraint};
pub use dwell::{candidate_points, lmo_dwell, CandidateSet, DwellSolution};
pub use enumerate::{enumerate_patterns, DEFAULT_ENUMERATION_CAP};
pub use lmo::{lmo_bounded, lmo_bounded_with_prefix, nearest_feasible};
pub use separation::{separate_alternating, AlternatingCut, EPS_SEP};

use std::fmt;

/// Cell guard for the bounded-switching dynamic program.
pub const LMO_CELL_GUARD: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq)]
pub enum SwitchError {
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    EmptyColumnSet,
    InvalidColumn {
        mask: u32,
        n: usize,
    },
    /// DP table would exceed [`LMO_CELL_GUARD`] cells.
    ResourceGuard {
        cells: usize,
        cap: usize,
    },
    /// Enumeration exceeded the requested cap.
    CapExceeded {
        cap: usize,
    },
    InvalidDwell {
        dwell: f64,
        horizon: f64,
    },
    /// The dwell-time machinery covers single-switch problems only.
    DwellNeedsSingleSwitch {
        n: usize,
    },
    /// A branch-and-bound prefix is not itself feasible.
    InfeasiblePrefix,
}

impl fmt::Display for SwitchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SwitchError::DimensionMismatch { expected, got } => write!(
                f,
                "pattern dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            SwitchError::EmptyColumnSet => write!(f, "allowed column set must be nonempty"),
            SwitchError::InvalidColumn { mask, n } => {
                write!(f, "column mask {mask:#b} out of range for {n} switches")
            }
            SwitchError::ResourceGuard { cells, cap } => {
                write!(f, "DP resource guard: {cells} cells exceed cap {cap}")
            }
            SwitchError::CapExceeded { cap } => {
                write!(f, "enumeration exceeds cap {cap}")
            }
            SwitchError::InvalidDwell { dwell, horizon } => {
                write!(f, "dwell time {dwell} outside (0, {horizon}]")
            }
            SwitchError::DwellNeedsSingleSwitch { n } => {
                write!(f, "dwell-time constraint requires n = 1, got n = {n}")
            }
            SwitchError::InfeasiblePrefix => write!(f, "fixed prefix violates the constraint"),
        }
    }
}

impl std::error::Error for SwitchError {}
