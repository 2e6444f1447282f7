//! Problem data and its discretization at a given mesh/grid resolution.

use std::sync::Arc;

use super::assemble::{assemble_fem, assemble_load};
use super::band::{BandCholesky, SymBand};
use super::grid::TimeGrid;
use super::mesh::SpaceMesh;
use super::FemError;
use crate::switching::SwitchingConstraint;

pub type ScalarField = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type SpaceTimeField = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Resolution-independent description of a control problem: form functions,
/// desired state, initial state, Tikhonov weight, horizon, and the switching
/// constraint. An [`Instance`] is this data sampled on a concrete mesh/grid.
#[derive(Clone)]
pub struct ProblemSetup {
    pub n_switches: usize,
    pub horizon: f64,
    pub alpha: f64,
    /// Form functions ψ_j, one per switch.
    pub forcing: Vec<ScalarField>,
    /// Desired state y_d(t, x1, x2).
    pub desired_state: SpaceTimeField,
    /// Initial state y_0(x1, x2).
    pub initial_state: ScalarField,
    pub constraint: SwitchingConstraint,
}

impl ProblemSetup {
    fn validate(&self) -> Result<(), FemError> {
        if self.n_switches == 0 || self.forcing.len() != self.n_switches {
            return Err(FemError::InvalidParameter {
                field: "forcing",
                message: format!(
                    "need one form function per switch (n = {}, got {})",
                    self.n_switches,
                    self.forcing.len()
                ),
            });
        }
        if self.alpha < 0.0 {
            return Err(FemError::InvalidParameter {
                field: "alpha",
                message: format!("Tikhonov weight must be nonnegative, got {}", self.alpha),
            });
        }
        Ok(())
    }
}

/// Crank–Nicolson step operators: the factored left-hand matrix
/// `M/dt + K/2` and the right-hand matrix `M/dt - K/2`.
#[derive(Clone, Debug)]
pub struct StepOperators {
    pub lhs: SymBand,
    pub lhs_chol: BandCholesky,
    pub rhs: SymBand,
}

/// A problem sampled on a concrete space mesh and time grid.
///
/// Everything is immutable after construction; solves are pure functions of
/// the instance and a control, so instances can be shared across threads.
#[derive(Clone)]
pub struct Instance {
    setup: Arc<ProblemSetup>,
    mesh: SpaceMesh,
    grid: TimeGrid,
    mass_interior: SymBand,
    stiffness_interior: SymBand,
    step: StepOperators,
    /// Interior load vectors b_j, one per switch.
    loads: Vec<Vec<f64>>,
    /// Desired-state samples at interior nodes, one vector per time node.
    desired: Vec<Vec<f64>>,
    /// Initial state at interior nodes.
    initial: Vec<f64>,
}

impl Instance {
    pub fn build(setup: Arc<ProblemSetup>, n_x: usize, m: usize) -> Result<Self, FemError> {
        setup.validate()?;
        let mesh = SpaceMesh::uniform(n_x)?;
        let grid = TimeGrid::new(setup.horizon, m)?;
        let mats = assemble_fem(&mesh);
        let dt = grid.dt();
        let lhs = SymBand::lin_comb(1.0 / dt, &mats.mass_interior, 0.5, &mats.stiffness_interior);
        let rhs = SymBand::lin_comb(1.0 / dt, &mats.mass_interior, -0.5, &mats.stiffness_interior);
        let lhs_chol = lhs
            .cholesky()
            .map_err(|pivot| FemError::NotPositiveDefinite { pivot })?;
        let loads = setup
            .forcing
            .iter()
            .map(|psi| {
                let full = assemble_load(&mesh, |x, y| psi(x, y));
                mesh.restrict_interior(&full)
            })
            .collect();
        let desired = (0..=m)
            .map(|k| {
                let t = grid.node(k);
                mesh.sample_interior(|x, y| (setup.desired_state)(t, x, y))
            })
            .collect();
        let initial = mesh.sample_interior(|x, y| (setup.initial_state)(x, y));
        Ok(Instance {
            setup,
            mesh,
            grid,
            mass_interior: mats.mass_interior,
            stiffness_interior: mats.stiffness_interior,
            step: StepOperators {
                lhs,
                lhs_chol,
                rhs,
            },
            loads,
            desired,
            initial,
        })
    }

    pub fn setup(&self) -> &Arc<ProblemSetup> {
        &self.setup
    }

    pub fn mesh(&self) -> &SpaceMesh {
        &self.mesh
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn constraint(&self) -> &SwitchingConstraint {
        &self.setup.constraint
    }

    pub fn n_switches(&self) -> usize {
        self.setup.n_switches
    }

    pub fn alpha(&self) -> f64 {
        self.setup.alpha
    }

    pub fn mass_interior(&self) -> &SymBand {
        &self.mass_interior
    }

    pub fn stiffness_interior(&self) -> &SymBand {
        &self.stiffness_interior
    }

    pub fn step(&self) -> &StepOperators {
        &self.step
    }

    pub fn load(&self, j: usize) -> &[f64] {
        &self.loads[j]
    }

    pub fn desired(&self, node: usize) -> &[f64] {
        &self.desired[node]
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }
}
