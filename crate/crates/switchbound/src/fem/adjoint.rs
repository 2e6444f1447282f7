//! Exact gradient of the discretized objective via the discrete adjoint of
//! the Crank–Nicolson scheme.

use super::instance::Instance;
use super::state::{solve_state, step_solve, ControlVector};
use super::FemError;

/// Gradient of the discrete objective with respect to the control.
///
/// This is the adjoint of the discretized forward map, not a discretization
/// of the continuous adjoint: entry `(j, i)` is `p_iᵀ b_j + α dt (u_{j,i} - ½)`
/// where `p` solves the backward recursion
/// `(M/dt + K/2) p_i = (M/dt - K/2) p_{i+1} + w_i` with the tridiagonal
/// tracking weights `w_i` of the piecewise-linear error integral.
pub fn reduced_gradient(instance: &Instance, u: &ControlVector) -> Result<ControlVector, FemError> {
    let traj = solve_state(instance, u)?;
    let m = instance.grid().n_intervals();
    let dt = instance.grid().dt();
    let mass = instance.mass_interior();
    let n_int = instance.mesh().n_interior();

    // e_k = y_k - y_d(t_k), premultiplied by M.
    let m_err: Vec<Vec<f64>> = (0..=m)
        .map(|k| {
            let e: Vec<f64> = traj
                .at(k)
                .iter()
                .zip(instance.desired(k))
                .map(|(y, d)| y - d)
                .collect();
            mass.matvec_alloc(&e)
        })
        .collect();

    // dJ/dy_i: interior time nodes weight (1, 4, 1)·dt/6, the final node
    // (1, 2)·dt/6.
    let source = |i: usize| -> Vec<f64> {
        let mut w = vec![0.0; n_int];
        if i == m {
            for k in 0..n_int {
                w[k] = dt / 6.0 * (m_err[m - 1][k] + 2.0 * m_err[m][k]);
            }
        } else {
            for k in 0..n_int {
                w[k] = dt / 6.0 * (m_err[i - 1][k] + 4.0 * m_err[i][k] + m_err[i + 1][k]);
            }
        }
        w
    };

    // Backward adjoint sweep: p_m, p_{m-1}, ..., p_1.
    let mut adjoint = vec![vec![0.0; n_int]; m + 1];
    adjoint[m] = step_solve(instance, &source(m))?;
    for i in (1..m).rev() {
        let mut rhs = vec![0.0; n_int];
        instance.step().rhs.matvec(&adjoint[i + 1], &mut rhs);
        for (r, s) in rhs.iter_mut().zip(source(i)) {
            *r += s;
        }
        adjoint[i] = step_solve(instance, &rhs)?;
    }

    let alpha = instance.alpha();
    let mut grad = ControlVector::zeros(u.n(), u.m());
    for j in 0..u.n() {
        let b = instance.load(j);
        for i in 1..=m {
            let lin: f64 = adjoint[i].iter().zip(b).map(|(p, b)| p * b).sum();
            let tik = alpha * dt * (u.get(j, i - 1) - 0.5);
            grad.set(j, i - 1, lin + tik);
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{objective, Instance, ProblemSetup};
    use crate::switching::{BoundedSwitchings, SwitchingConstraint};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn setup(alpha: f64) -> Arc<ProblemSetup> {
        Arc::new(ProblemSetup {
            n_switches: 2,
            horizon: 1.5,
            alpha,
            forcing: vec![
                Arc::new(|x: f64, y: f64| (PI * x).sin() * (PI * y).sin()),
                Arc::new(|x: f64, y: f64| x * y * (1.0 - x) * (1.0 - y) * 20.0),
            ],
            desired_state: Arc::new(|t: f64, x: f64, y: f64| {
                t * (PI * x).sin() * (2.0 * PI * y).sin()
            }),
            initial_state: Arc::new(|_x, _y| 0.0),
            constraint: SwitchingConstraint::Bounded(BoundedSwitchings::all_columns(2, 2, true)),
        })
    }

    fn finite_difference_gradient(
        inst: &Instance,
        u: &ControlVector,
        h: f64,
    ) -> ControlVector {
        let mut fd = ControlVector::zeros(u.n(), u.m());
        for j in 0..u.n() {
            for i in 0..u.m() {
                let mut up = u.clone();
                up.set(j, i, u.get(j, i) + h);
                let mut dn = u.clone();
                dn.set(j, i, u.get(j, i) - h);
                let d = (objective(inst, &up).unwrap() - objective(inst, &dn).unwrap())
                    / (2.0 * h);
                fd.set(j, i, d);
            }
        }
        fd
    }

    #[test]
    fn adjoint_gradient_matches_central_differences() {
        let inst = Instance::build(setup(0.4), 10, 10).unwrap();
        // A deterministic "random enough" control in (0, 1).
        let u = ControlVector::from_flat(
            2,
            10,
            (0..20)
                .map(|k| 0.5 + 0.4 * ((k as f64 * 2.399) % 1.0 - 0.5))
                .collect(),
        );
        let g = reduced_gradient(&inst, &u).unwrap();
        let fd = finite_difference_gradient(&inst, &u, 1e-5);
        for j in 0..2 {
            for i in 0..10 {
                let a = g.get(j, i);
                let b = fd.get(j, i);
                assert!(
                    (a - b).abs() <= 1e-5 * (1.0 + b.abs()),
                    "entry ({j},{i}): adjoint {a} vs fd {b}"
                );
            }
        }
    }

    #[test]
    fn gradient_vanishes_at_attainable_target() {
        // Choose y_d as the state of a control ū; at u = ū with α = 0 the
        // objective is globally minimal so the gradient must vanish.
        let base = setup(0.0);
        let inst0 = Instance::build(base.clone(), 8, 6).unwrap();
        let u_bar = ControlVector::from_flat(1, 6, vec![1.0, 0.0, 0.5, 0.25, 0.75, 0.1]);
        let u_bar_2 = ControlVector::from_flat(
            2,
            6,
            u_bar
                .as_slice()
                .iter()
                .chain(u_bar.as_slice().iter())
                .copied()
                .collect(),
        );
        let traj = crate::fem::solve_state(&inst0, &u_bar_2).unwrap();
        let traj = std::sync::Arc::new(traj.into_values());
        let grid = inst0.grid().clone();
        let mesh_nx = inst0.mesh().n_x();
        let mesh = inst0.mesh().clone();
        let traj_for_closure = traj.clone();
        let target: crate::fem::SpaceTimeField = Arc::new(move |t: f64, x: f64, y: f64| {
            // Piecewise-linear-in-time lookup of the stored trajectory at a
            // node coordinate; only exact at mesh nodes, which is all the
            // instance samples.
            let m = traj_for_closure.len() - 1;
            let s = (t / grid.horizon() * m as f64).clamp(0.0, m as f64);
            let k = (s.floor() as usize).min(m - 1);
            let w = s - k as f64;
            let ix = (x * (mesh_nx - 1) as f64).round() as usize;
            let iy = (y * (mesh_nx - 1) as f64).round() as usize;
            let node = iy * mesh_nx + ix;
            match mesh.interior_index(node) {
                Some(idx) => {
                    (1.0 - w) * traj_for_closure[k][idx] + w * traj_for_closure[k + 1][idx]
                }
                None => 0.0,
            }
        });
        let setup2 = Arc::new(ProblemSetup {
            desired_state: target,
            ..(*base).clone()
        });
        let inst = Instance::build(setup2, 8, 6).unwrap();
        let g = reduced_gradient(&inst, &u_bar_2).unwrap();
        for v in g.as_slice() {
            assert!(v.abs() <= 1e-8, "gradient entry {v} should vanish");
        }
    }

    #[test]
    fn pure_tikhonov_gradient_is_closed_form() {
        let base = setup(7.0);
        let setup2 = Arc::new(ProblemSetup {
            forcing: vec![Arc::new(|_, _| 0.0), Arc::new(|_, _| 0.0)],
            desired_state: Arc::new(|_, _, _| 0.0),
            ..(*base).clone()
        });
        let inst = Instance::build(setup2, 6, 5).unwrap();
        let u = ControlVector::from_flat(2, 5, (0..10).map(|k| k as f64 / 10.0).collect());
        let g = reduced_gradient(&inst, &u).unwrap();
        let dt = inst.grid().dt();
        for j in 0..2 {
            for i in 0..5 {
                let expect = 7.0 * dt * (u.get(j, i) - 0.5);
                assert!((g.get(j, i) - expect).abs() < 1e-12);
            }
        }
    }
}
