//! Lower bounds and exact optima for binary switching control of the heat
//! equation under combinatorial switching constraints.
//!
//! The crate is organized in four layers:
//!
//! * [`fem`] — P1 finite-element discretization of the controlled heat
//!   equation on the unit square, Crank–Nicolson time stepping, the reduced
//!   objective `f(u) = ½uᵀHu + gᵀu + c`, its adjoint gradient, and fine-grid
//!   re-evaluation.
//! * [`switching`] — the combinatorial layer: feasibility of binary switching
//!   patterns, exact linear minimization oracles (dynamic programs for the
//!   bounded-switching and dwell-time constraints), pattern enumeration, and
//!   the alternating-inequality separation oracle.
//! * [`relax`] — convex relaxation solvers producing certified lower bounds:
//!   a dense active-set QP solver, the box+total-variation relaxation, the
//!   cutting-plane relaxation driven by the separation oracle, and a
//!   Frank–Wolfe bound driven by the exact LMOs.
//! * [`exact`] — global minimization over the feasible binary patterns by
//!   exhaustive enumeration or branch-and-bound with Frank–Wolfe node bounds.

pub mod exact;
pub mod fem;
pub mod relax;
pub mod switching;

pub use fem::{
    assemble_fem, assemble_load, assemble_reduced_quadratic, evaluate_fine, objective,
    reduced_gradient, solve_state, ControlVector, FemError, Instance, ProblemSetup,
    ReducedQuadratic, SpaceMesh, TimeGrid, Trajectory,
};
pub use switching::{
    candidate_points, enumerate_patterns, feasible, lmo_bounded, lmo_dwell, nearest_feasible,
    separate_alternating, AlternatingCut, BinaryPattern, BoundedSwitchings, CandidateSet,
    DwellSolution, SwitchError, SwitchingConstraint,
};

pub use exact::{solve_exact_bnb, solve_exact_enum, BnbOutcome, ExactError};
pub use relax::{
    frank_wolfe_bound, naive_relaxation, solve_qp, tailored_relaxation, BoundReport, FwOptions,
    LinearRow, QpSolution, QuadraticModel, RelaxError, Termination,
};
