//! State solves, objective evaluation, and fine-grid re-evaluation.

use super::instance::Instance;
use super::{FemError, LINEAR_SOLVE_TOL};

/// An `n x m` matrix of control values, entry `(j, i)` being the value of
/// switch `j` on time interval `i`. Stored switch-major: flat index
/// `j * m + i`, matching the variable order of the reduced quadratic.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlVector {
    n: usize,
    m: usize,
    data: Vec<f64>,
}

impl ControlVector {
    pub fn zeros(n: usize, m: usize) -> Self {
        ControlVector {
            n,
            m,
            data: vec![0.0; n * m],
        }
    }

    pub fn constant(n: usize, m: usize, value: f64) -> Self {
        ControlVector {
            n,
            m,
            data: vec![value; n * m],
        }
    }

    pub fn from_flat(n: usize, m: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * m);
        ControlVector { n, m, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.data[j * self.m + i]
    }

    pub fn set(&mut self, j: usize, i: usize, value: f64) {
        self.data[j * self.m + i] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    /// Replicates each interval value `factor` times onto a finer time grid.
    pub fn prolong(&self, factor: usize) -> ControlVector {
        let mut data = Vec::with_capacity(self.n * self.m * factor);
        for j in 0..self.n {
            for i in 0..self.m {
                let v = self.get(j, i);
                data.extend(std::iter::repeat(v).take(factor));
            }
        }
        ControlVector {
            n: self.n,
            m: self.m * factor,
            data,
        }
    }
}

/// Interior node values at each time node (piecewise linear in time).
#[derive(Clone, Debug)]
pub struct Trajectory {
    values: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn n_nodes(&self) -> usize {
        self.values.len()
    }

    pub fn at(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn into_values(self) -> Vec<Vec<f64>> {
        self.values
    }
}

fn check_dims(instance: &Instance, u: &ControlVector) -> Result<(), FemError> {
    let expected = (instance.n_switches(), instance.grid().n_intervals());
    if (u.n(), u.m()) != expected {
        return Err(FemError::ControlDimension {
            expected,
            got: (u.n(), u.m()),
        });
    }
    Ok(())
}

/// One Crank–Nicolson step: solves `(M/dt + K/2) y = rhs` and verifies the
/// residual against [`LINEAR_SOLVE_TOL`].
pub(super) fn step_solve(instance: &Instance, rhs: &[f64]) -> Result<Vec<f64>, FemError> {
    let y = instance.step().lhs_chol.solve(rhs);
    let ay = instance.step().lhs.matvec_alloc(&y);
    let scale = rhs.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
    let residual = ay
        .iter()
        .zip(rhs)
        .fold(0.0f64, |a, (x, b)| a.max((x - b).abs()));
    if residual > LINEAR_SOLVE_TOL * scale {
        return Err(FemError::SolveResidual {
            residual,
            tolerance: LINEAR_SOLVE_TOL * scale,
        });
    }
    Ok(y)
}

/// Solves the state equation with the Crank–Nicolson scheme:
/// `(M/dt + K/2) y_i = (M/dt - K/2) y_{i-1} + Σ_j u_{j,i} b_j`.
pub fn solve_state(instance: &Instance, u: &ControlVector) -> Result<Trajectory, FemError> {
    check_dims(instance, u)?;
    let m = instance.grid().n_intervals();
    let n_int = instance.mesh().n_interior();
    let mut values = Vec::with_capacity(m + 1);
    values.push(instance.initial().to_vec());
    let mut rhs = vec![0.0; n_int];
    for i in 0..m {
        instance.step().rhs.matvec(&values[i], &mut rhs);
        for j in 0..u.n() {
            let uv = u.get(j, i);
            if uv != 0.0 {
                for (r, b) in rhs.iter_mut().zip(instance.load(j)) {
                    *r += uv * b;
                }
            }
        }
        values.push(step_solve(instance, &rhs)?);
    }
    Ok(Trajectory { values })
}

/// Tracking term of the objective for a given state trajectory:
/// `½ Σ_i dt/3 (e_{i-1}ᵀ M e_{i-1} + e_{i-1}ᵀ M e_i + e_iᵀ M e_i)` with
/// `e_k = y_k - y_d(t_k)`, the exact integral of the squared piecewise-linear
/// error.
pub(super) fn tracking_term(instance: &Instance, traj: &Trajectory) -> f64 {
    let m = instance.grid().n_intervals();
    let dt = instance.grid().dt();
    let mass = instance.mass_interior();
    let errors: Vec<Vec<f64>> = (0..=m)
        .map(|k| {
            traj.at(k)
                .iter()
                .zip(instance.desired(k))
                .map(|(y, d)| y - d)
                .collect()
        })
        .collect();
    let m_errors: Vec<Vec<f64>> = errors.iter().map(|e| mass.matvec_alloc(e)).collect();
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let mut total = 0.0;
    for i in 1..=m {
        let prev = dot(&errors[i - 1], &m_errors[i - 1]);
        let cross = dot(&errors[i - 1], &m_errors[i]);
        let cur = dot(&errors[i], &m_errors[i]);
        total += dt / 3.0 * (prev + cross + cur);
    }
    0.5 * total
}

pub(super) fn tikhonov_term(instance: &Instance, u: &ControlVector) -> f64 {
    let dt = instance.grid().dt();
    let alpha = instance.alpha();
    if alpha == 0.0 {
        return 0.0;
    }
    let sum: f64 = u.as_slice().iter().map(|v| (v - 0.5) * (v - 0.5)).sum();
    0.5 * alpha * dt * sum
}

/// Discrete objective `½‖y - y_d‖²_Q + (α/2)‖u - ½‖²`.
pub fn objective(instance: &Instance, u: &ControlVector) -> Result<f64, FemError> {
    let traj = solve_state(instance, u)?;
    Ok(tracking_term(instance, &traj) + tikhonov_term(instance, u))
}

/// Re-evaluates the objective of `u` on a finer discretization, prolonging
/// the control by replication (requires `m | m_fine`).
pub fn evaluate_fine(
    instance: &Instance,
    u: &ControlVector,
    n_x_fine: usize,
    m_fine: usize,
) -> Result<f64, FemError> {
    check_dims(instance, u)?;
    let m = instance.grid().n_intervals();
    if m_fine % m != 0 {
        return Err(FemError::RefinementMismatch { m, m_fine });
    }
    let fine = Instance::build(instance.setup().clone(), n_x_fine, m_fine)?;
    let u_fine = u.prolong(m_fine / m);
    objective(&fine, &u_fine)
}
