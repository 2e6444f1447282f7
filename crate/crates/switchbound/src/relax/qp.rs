//! Dense primal active-set solver for box-constrained convex QPs with
//! additional linear inequality rows.
//!
//! Handles positive semidefinite Hessians (the cut-loop masters carry
//! constraint-only variables with zero curvature): equality-constrained
//! subproblems are solved through an eigendecomposition of the reduced
//! Hessian, and zero-curvature descent directions step to their blocking
//! constraint, which exists because the box keeps the feasible set bounded.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::RelaxError;

/// One inequality row `aᵀx <= rhs` with sparse coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl LinearRow {
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(i, a)| a * x[i]).sum()
    }
}

/// Convex quadratic over the box `[0,1]^n` with extra inequality rows.
///
/// The box is implicit; `rows` holds cutting planes and model-specific
/// couplings. `feasible_point` must satisfy every constraint (the all-zero
/// vector works for every model in this crate).
#[derive(Clone, Debug)]
pub struct QuadraticModel {
    pub hessian: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub constant: f64,
    pub rows: Vec<LinearRow>,
    pub feasible_point: Vec<f64>,
}

impl QuadraticModel {
    pub fn new(hessian: DMatrix<f64>, linear: DVector<f64>, constant: f64) -> Self {
        let dim = linear.len();
        assert_eq!(hessian.nrows(), dim);
        assert_eq!(hessian.ncols(), dim);
        QuadraticModel {
            hessian,
            linear,
            constant,
            rows: Vec::new(),
            feasible_point: vec![0.0; dim],
        }
    }

    pub fn from_reduced(quad: &crate::fem::ReducedQuadratic) -> Self {
        QuadraticModel::new(quad.h.clone(), quad.g.clone(), quad.c)
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn n_constraints(&self) -> usize {
        2 * self.dim() + self.rows.len()
    }

    pub fn push_row(&mut self, row: LinearRow) {
        self.rows.push(row);
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * (&self.hessian * x).dot(x) + self.linear.dot(x) + self.constant
    }

    /// Constraint normal as a dense vector. Ids: `0..dim` upper bounds
    /// `x_i <= 1`, `dim..2dim` lower bounds `-x_i <= 0`, then rows.
    fn normal(&self, id: usize) -> DVector<f64> {
        let dim = self.dim();
        let mut a = DVector::zeros(dim);
        if id < dim {
            a[id] = 1.0;
        } else if id < 2 * dim {
            a[id - dim] = -1.0;
        } else {
            for &(i, v) in &self.rows[id - 2 * dim].coeffs {
                a[i] += v;
            }
        }
        a
    }

    fn rhs(&self, id: usize) -> f64 {
        let dim = self.dim();
        if id < dim {
            1.0
        } else if id < 2 * dim {
            0.0
        } else {
            self.rows[id - 2 * dim].rhs
        }
    }

    /// `aᵀp` for constraint `id` (O(1) for box rows).
    fn normal_dot(&self, id: usize, p: &DVector<f64>) -> f64 {
        let dim = self.dim();
        if id < dim {
            p[id]
        } else if id < 2 * dim {
            -p[id - dim]
        } else {
            self.rows[id - 2 * dim]
                .coeffs
                .iter()
                .map(|&(i, v)| v * p[i])
                .sum()
        }
    }

    /// Slack `rhs - aᵀx` of constraint `id`.
    fn slack(&self, id: usize, x: &DVector<f64>) -> f64 {
        self.rhs(id) - self.normal_dot(id, x)
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        (0..self.n_constraints())
            .map(|id| -self.slack(id, &xv))
            .fold(0.0f64, f64::max)
    }
}

/// Solution of a QP master: minimizer, objective value (with constant),
/// multipliers per constraint id, verified KKT residual, and the final
/// working set (for warm starts).
#[derive(Clone, Debug)]
pub struct QpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub multipliers: Vec<f64>,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub working_set: Vec<usize>,
}

pub const QP_MAX_ITER: usize = 10_000;

/// Orthonormal basis data of the working-set normals.
struct WorkingBasis {
    /// Columns: orthonormalized constraint normals.
    q: DMatrix<f64>,
    /// Upper-triangular coefficients: `A_Wᵀ = Q R`.
    r: DMatrix<f64>,
}

fn orthonormalize(model: &QuadraticModel, working: &[usize]) -> WorkingBasis {
    let dim = model.dim();
    let k = working.len();
    let mut q = DMatrix::zeros(dim, k);
    let mut r = DMatrix::zeros(k, k);
    for (col, &id) in working.iter().enumerate() {
        let mut v = model.normal(id);
        // Modified Gram-Schmidt with one re-orthogonalization pass.
        for _ in 0..2 {
            for prev in 0..col {
                let proj = q.column(prev).dot(&v);
                r[(prev, col)] += proj;
                v -= q.column(prev).scale(proj);
            }
        }
        let norm = v.norm();
        // Working-set normals are independent by construction.
        r[(col, col)] = norm;
        q.set_column(col, &(v / norm));
    }
    WorkingBasis { q, r }
}

/// Null-space basis of the working-set normals (orthonormal columns).
fn null_space(basis: &WorkingBasis, dim: usize) -> DMatrix<f64> {
    let k = basis.q.ncols();
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(dim - k);
    for e in 0..dim {
        if cols.len() == dim - k {
            break;
        }
        let mut v = DVector::zeros(dim);
        v[e] = 1.0;
        for _ in 0..2 {
            for c in 0..k {
                let proj = basis.q.column(c).dot(&v);
                v -= basis.q.column(c).scale(proj);
            }
            for z in &cols {
                let proj = z.dot(&v);
                v -= z.scale(proj);
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / norm);
        }
    }
    debug_assert_eq!(cols.len(), dim - k);
    let mut z = DMatrix::zeros(dim, cols.len());
    for (i, c) in cols.iter().enumerate() {
        z.set_column(i, c);
    }
    z
}

/// Multipliers solving `A_Wᵀ λ = grad` in least squares.
fn multipliers(basis: &WorkingBasis, grad: &DVector<f64>) -> DVector<f64> {
    let k = basis.q.ncols();
    if k == 0 {
        return DVector::zeros(0);
    }
    let qt_g = basis.q.transpose() * grad;
    let mut lam = qt_g;
    // Back substitution with R upper triangular.
    for i in (0..k).rev() {
        for j in (i + 1)..k {
            let v = lam[j];
            lam[i] -= basis.r[(i, j)] * v;
        }
        lam[i] /= basis.r[(i, i)];
    }
    lam
}

pub fn solve_qp(model: &QuadraticModel, tol: f64) -> Result<QpSolution, RelaxError> {
    solve_qp_warm(model, tol, None)
}

/// Warm start: previous minimizer and working set. The point is pulled back
/// toward the model's feasible point if new rows cut it off; stale working
/// ids are dropped.
#[derive(Clone, Debug, Default)]
pub struct WarmStart {
    pub x: Vec<f64>,
    pub working_set: Vec<usize>,
}

pub fn solve_qp_warm(
    model: &QuadraticModel,
    tol: f64,
    warm: Option<&WarmStart>,
) -> Result<QpSolution, RelaxError> {
    let dim = model.dim();
    let n_con = model.n_constraints();
    let feas_tol = 1e-12;

    let mut x = DVector::from_column_slice(&model.feasible_point);
    if model.max_violation(model.feasible_point.as_slice()) > 1e-9 {
        return Err(RelaxError::InfeasibleStart {
            violation: model.max_violation(model.feasible_point.as_slice()),
        });
    }
    let mut working: Vec<usize> = Vec::new();
    if let Some(w) = warm {
        if w.x.len() == dim {
            let mut cand = DVector::from_column_slice(&w.x);
            let viol = model.max_violation(&w.x);
            if viol > feas_tol {
                // Shrink toward the feasible point past every violated row.
                let mut t = 1.0f64;
                for id in 0..n_con {
                    let sc = model.slack(id, &cand);
                    if sc < 0.0 {
                        let sf = model.slack(id, &x);
                        // slack(t) = sf + t (sc - sf); need >= 0.
                        if sc - sf < 0.0 {
                            t = t.min(sf / (sf - sc));
                        }
                    }
                }
                cand = &x + t.clamp(0.0, 1.0) * (cand - &x);
            }
            if model.max_violation(cand.as_slice()) <= 1e-9 {
                x = cand;
                working = w
                    .working_set
                    .iter()
                    .copied()
                    .filter(|&id| id < n_con && model.slack(id, &x).abs() <= 1e-9)
                    .collect();
                // Keep only an independent subset.
                let mut kept: Vec<usize> = Vec::new();
                for &id in &working {
                    if kept.len() == dim {
                        break;
                    }
                    kept.push(id);
                    let basis = orthonormalize(model, &kept);
                    if basis.r[(kept.len() - 1, kept.len() - 1)] < 1e-8 {
                        kept.pop();
                    }
                }
                working = kept;
            }
        }
    }

    let scale = model
        .linear
        .amax()
        .max(model.hessian.amax())
        .max(1.0);
    let zero_curv_tol = 1e-12;
    let stat_tol = (1e-10 * scale).min(0.25 * tol);

    for iter in 0..QP_MAX_ITER {
        let grad = &model.hessian * &x + &model.linear;
        let basis = orthonormalize(model, &working);
        let z = null_space(&basis, dim);
        let nz = z.ncols();

        // Reduced gradient and Hessian.
        let gz = z.transpose() * &grad;
        let step: Option<DVector<f64>> = if nz == 0 {
            None
        } else {
            let hz = z.transpose() * &model.hessian * &z;
            let eig = SymmetricEigen::new(hz);
            let lam_max = eig.eigenvalues.amax().max(1.0);
            let cut = zero_curv_tol * lam_max;
            let coeffs = eig.eigenvectors.transpose() * &gz;
            // Zero-curvature descent direction, if any.
            let mut ray: Option<usize> = None;
            let mut ray_mag = stat_tol;
            for i in 0..nz {
                if eig.eigenvalues[i] <= cut && coeffs[i].abs() > ray_mag {
                    ray = Some(i);
                    ray_mag = coeffs[i].abs();
                }
            }
            if let Some(i) = ray {
                let dir = &z * eig.eigenvectors.column(i).clone_owned();
                Some(if coeffs[i] > 0.0 { -dir } else { dir })
            } else {
                let mut pz = DVector::zeros(nz);
                for i in 0..nz {
                    if eig.eigenvalues[i] > cut {
                        pz += -(coeffs[i] / eig.eigenvalues[i])
                            * eig.eigenvectors.column(i).clone_owned();
                    }
                }
                let p = &z * pz;
                if p.amax() <= 1e-14 * (1.0 + x.amax()) {
                    None
                } else {
                    Some(p)
                }
            }
        };

        match step {
            None => {
                // Stationary on the working set: check multipliers.
                let lam = multipliers(&basis, &grad);
                let mut worst: Option<(usize, f64)> = None;
                for k in 0..working.len() {
                    if lam[k] < 0.0 {
                        let better = match worst {
                            Some((_, v)) => lam[k] < v,
                            None => true,
                        };
                        if better {
                            worst = Some((k, lam[k]));
                        }
                    }
                }
                match worst {
                    Some((k, v)) if v < -stat_tol => {
                        working.remove(k);
                    }
                    _ => {
                        // Optimal: assemble the report.
                        let mut multipliers_full = vec![0.0; n_con];
                        let mut stat = grad.clone();
                        for (k, &id) in working.iter().enumerate() {
                            let lk = lam[k].max(0.0);
                            multipliers_full[id] = lk;
                            stat -= lk * model.normal(id);
                        }
                        let mut residual = stat.amax();
                        for id in 0..n_con {
                            let s = model.slack(id, &x);
                            residual = residual.max(-s);
                            residual = residual.max((multipliers_full[id] * s).abs());
                        }
                        if residual > tol {
                            return Err(RelaxError::KktResidual { residual, tol });
                        }
                        return Ok(QpSolution {
                            value: model.value(&x),
                            x: x.as_slice().to_vec(),
                            multipliers: multipliers_full,
                            kkt_residual: residual,
                            iterations: iter,
                            working_set: working,
                        });
                    }
                }
            }
            Some(p) => {
                // Ratio test toward the nearest blocking constraint.
                let curvature = (&model.hessian * &p).dot(&p);
                let slope = grad.dot(&p);
                let newton_alpha = if curvature > 0.0 {
                    (-slope / curvature).max(0.0)
                } else {
                    f64::INFINITY
                };
                let mut alpha = newton_alpha;
                let mut blocking: Option<usize> = None;
                for id in 0..n_con {
                    if working.contains(&id) {
                        continue;
                    }
                    let ap = model.normal_dot(id, &p);
                    if ap > 1e-12 {
                        let s = model.slack(id, &x).max(0.0);
                        let a = s / ap;
                        if a < alpha - 1e-15 {
                            alpha = a;
                            blocking = Some(id);
                        }
                    }
                }
                if alpha.is_infinite() {
                    return Err(RelaxError::Unbounded);
                }
                x += alpha * &p;
                if let Some(id) = blocking {
                    working.push(id);
                }
            }
        }
    }
    let grad = &model.hessian * &x + &model.linear;
    let basis = orthonormalize(model, &working);
    let lam = multipliers(&basis, &grad);
    let mut stat = grad.clone();
    for (k, &id) in working.iter().enumerate() {
        stat -= lam[k].max(0.0) * model.normal(id);
    }
    Err(RelaxError::IterationCap {
        residual: stat.amax(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn identity_model(dim: usize, linear: Vec<f64>) -> QuadraticModel {
        QuadraticModel::new(
            DMatrix::identity(dim, dim),
            DVector::from_vec(linear),
            0.0,
        )
    }

    /// Independent KKT verification from scratch.
    fn assert_kkt(model: &QuadraticModel, sol: &QpSolution, tol: f64) {
        let x = DVector::from_column_slice(&sol.x);
        let mut stat = &model.hessian * &x + &model.linear;
        for id in 0..model.n_constraints() {
            let lam = sol.multipliers[id];
            assert!(lam >= -tol, "dual feasibility at {id}: {lam}");
            let s = model.slack(id, &x);
            assert!(s >= -tol, "primal feasibility at {id}: slack {s}");
            assert!((lam * s).abs() <= tol * 10.0, "complementarity at {id}");
            stat -= lam * model.normal(id);
        }
        assert!(stat.amax() <= tol * 10.0, "stationarity {}", stat.amax());
    }

    #[test]
    fn interior_optimum_tikhonov_model() {
        // H = a I, g = -a/2: unconstrained optimum at 1/2 inside the box.
        let a = 3.0;
        let dim = 6;
        let model = QuadraticModel::new(
            DMatrix::identity(dim, dim) * a,
            DVector::from_element(dim, -a * 0.5),
            0.0,
        );
        let sol = solve_qp(&model, 1e-8).unwrap();
        for v in &sol.x {
            assert!((v - 0.5).abs() < 1e-10);
        }
        assert_kkt(&model, &sol, 1e-8);
    }

    #[test]
    fn clipped_optimum_at_upper_box() {
        let model = identity_model(4, vec![-2.0; 4]);
        let sol = solve_qp(&model, 1e-8).unwrap();
        for v in &sol.x {
            assert!((v - 1.0).abs() < 1e-10);
        }
        assert_kkt(&model, &sol, 1e-8);
    }

    #[test]
    fn hand_checked_cut_model() {
        // min ½(v1² + v2²) s.t. v1 - v2 <= -1/2 and the box: optimum (0, ½).
        let mut model = identity_model(2, vec![0.0, 0.0]);
        model.push_row(LinearRow {
            coeffs: vec![(0, 1.0), (1, -1.0)],
            rhs: -0.5,
        });
        model.feasible_point = vec![0.0, 0.5];
        let sol = solve_qp(&model, 1e-8).unwrap();
        assert!((sol.x[0] - 0.0).abs() < 1e-9, "x = {:?}", sol.x);
        assert!((sol.x[1] - 0.5).abs() < 1e-9);
        assert_kkt(&model, &sol, 1e-8);
    }

    #[test]
    fn semidefinite_hessian_with_free_variable() {
        // Second variable has zero curvature and positive cost pushing it to
        // its lower bound; first is a clipped parabola.
        let mut h = DMatrix::zeros(2, 2);
        h[(0, 0)] = 2.0;
        let model = QuadraticModel::new(h, DVector::from_vec(vec![-3.0, 0.25]), 1.0);
        let sol = solve_qp(&model, 1e-8).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
        assert!(sol.x[1].abs() < 1e-9);
        assert!((sol.value - (1.0 - 3.0 + 1.0)).abs() < 1e-9);
        assert_kkt(&model, &sol, 1e-8);
    }

    #[test]
    fn zero_objective_returns_feasible_point() {
        let model = identity_model(3, vec![0.0; 3]);
        let mut model = model;
        model.hessian *= 0.0;
        let sol = solve_qp(&model, 1e-8).unwrap();
        assert_kkt(&model, &sol, 1e-8);
        assert!((sol.value).abs() < 1e-12);
    }

    #[test]
    fn warm_start_reaches_same_optimum() {
        let mut model = identity_model(5, vec![-1.5, 0.3, -0.2, 0.9, -1.0]);
        model.push_row(LinearRow {
            coeffs: vec![(0, 1.0), (4, 1.0)],
            rhs: 1.2,
        });
        let cold = solve_qp(&model, 1e-8).unwrap();
        // Perturbed model as the cut loop would see it.
        let mut model2 = model.clone();
        model2.push_row(LinearRow {
            coeffs: vec![(0, 1.0), (1, -1.0)],
            rhs: 0.4,
        });
        let warm = WarmStart {
            x: cold.x.clone(),
            working_set: cold.working_set.clone(),
        };
        let warm_sol = solve_qp_warm(&model2, 1e-8, Some(&warm)).unwrap();
        let cold_sol = solve_qp(&model2, 1e-8).unwrap();
        assert!((warm_sol.value - cold_sol.value).abs() < 1e-9);
        assert_kkt(&model2, &warm_sol, 1e-8);
    }
}
