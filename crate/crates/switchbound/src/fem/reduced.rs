//! Explicit dense form `f(u) = ½uᵀHu + gᵀu + c` of the reduced objective.
//!
//! The control-to-state map is affine and time invariant, so the trajectory
//! of a unit control on interval `i` is the impulse response shifted by `i`.
//! One impulse-response sweep per switch (`m` solves each) yields all columns
//! of the linear part; Gram tables of mass inner products then assemble `H`,
//! `g`, and `c` exactly.

use nalgebra::{DMatrix, DVector};

use super::instance::Instance;
use super::state::{solve_state, step_solve, ControlVector};
use super::{FemError, DENSE_QUADRATIC_CAP};

/// Dense PSD quadratic `f(u) = ½uᵀHu + gᵀu + c` over the flattened control.
#[derive(Clone, Debug)]
pub struct ReducedQuadratic {
    pub h: DMatrix<f64>,
    pub g: DVector<f64>,
    pub c: f64,
}

impl ReducedQuadratic {
    pub fn new(h: DMatrix<f64>, g: DVector<f64>, c: f64) -> Self {
        assert_eq!(h.nrows(), h.ncols());
        assert_eq!(h.nrows(), g.len());
        ReducedQuadratic { h, g, c }
    }

    /// A purely linear objective `gᵀu + c` (zero curvature).
    pub fn linear(g: Vec<f64>, c: f64) -> Self {
        let dim = g.len();
        ReducedQuadratic {
            h: DMatrix::zeros(dim, dim),
            g: DVector::from_vec(g),
            c,
        }
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        let u = DVector::from_column_slice(u);
        0.5 * (&self.h * &u).dot(&u) + self.g.dot(&u) + self.c
    }

    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let u = DVector::from_column_slice(u);
        (&self.h * &u + &self.g).as_slice().to_vec()
    }
}

/// Assembles the dense reduced quadratic by impulse-response sweeps.
///
/// Guarded by [`DENSE_QUADRATIC_CAP`]: beyond that, callers should fall back
/// to matrix-free gradient evaluation.
pub fn assemble_reduced_quadratic(instance: &Instance) -> Result<ReducedQuadratic, FemError> {
    let n = instance.n_switches();
    let m = instance.grid().n_intervals();
    let dim = n * m;
    if dim > DENSE_QUADRATIC_CAP {
        return Err(FemError::DenseSizeGuard {
            size: dim,
            cap: DENSE_QUADRATIC_CAP,
        });
    }
    let dt = instance.grid().dt();
    let mass = instance.mass_interior();

    // Baseline error trajectory at u = 0 (affine part minus target).
    let zero = ControlVector::zeros(n, m);
    let base = solve_state(instance, &zero)?;
    let base_err: Vec<Vec<f64>> = (0..=m)
        .map(|k| {
            base.at(k)
                .iter()
                .zip(instance.desired(k))
                .map(|(y, d)| y - d)
                .collect()
        })
        .collect();
    let m_base_err: Vec<Vec<f64>> = base_err.iter().map(|e| mass.matvec_alloc(e)).collect();

    // Impulse responses: z[j][k] is the state k+1 steps after a unit control
    // on one interval of switch j (zero before the pulse).
    let mut impulse: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n);
    let mut m_impulse: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut seq = Vec::with_capacity(m);
        seq.push(step_solve(instance, instance.load(j))?);
        for k in 1..m {
            let rhs = instance.step().rhs.matvec_alloc(&seq[k - 1]);
            seq.push(step_solve(instance, &rhs)?);
        }
        m_impulse.push(seq.iter().map(|z| mass.matvec_alloc(z)).collect());
        impulse.push(seq);
    }

    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    // Gram tables gram[j][j'][k][l] = z[j][k]ᵀ M z[j'][l] and cross moments
    // cross[j][a][k] = e0_aᵀ M z[j][k].
    let mut gram = vec![vec![DMatrix::<f64>::zeros(m, m); n]; n];
    for j in 0..n {
        for jp in 0..n {
            for k in 0..m {
                for l in 0..m {
                    gram[j][jp][(k, l)] = dot(&impulse[j][k], &m_impulse[jp][l]);
                }
            }
        }
    }
    let mut cross = vec![DMatrix::<f64>::zeros(m + 1, m); n];
    for j in 0..n {
        for a in 0..=m {
            for k in 0..m {
                cross[j][(a, k)] = dot(&base_err[a], &m_impulse[j][k]);
            }
        }
    }

    // Tridiagonal time weights of the exact piecewise-linear error integral:
    // B(v, w) = Σ_{a,b} W_ab ⟨v_a, w_b⟩_M with W_aa = 2dt/3 (dt/3 at the
    // ends) and W_{a,a±1} = dt/6.
    let w_diag = |a: usize| -> f64 {
        if a == 0 || a == m {
            dt / 3.0
        } else {
            2.0 * dt / 3.0
        }
    };
    let w_off = dt / 6.0;

    // Response of column (j, i) at time node a is z[j][a - 1 - i] for
    // a >= i + 1 (unit control on zero-based interval i acts from node i+1).
    let response = |j: usize, i: usize, a: usize| -> Option<usize> {
        if a >= i + 1 {
            Some(a - 1 - i)
        } else {
            None
        }
    };

    let pair_weight = |a: usize, b: usize| -> Option<f64> {
        if a == b {
            Some(w_diag(a))
        } else if a + 1 == b || b + 1 == a {
            Some(w_off)
        } else {
            None
        }
    };

    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..n {
        for i in 0..m {
            let row = j * m + i;
            for jp in 0..n {
                for ip in 0..m {
                    let col = jp * m + ip;
                    if col < row {
                        continue;
                    }
                    let mut acc = 0.0;
                    // Only |a - b| <= 1 pairs carry weight.
                    let a_min = i + 1;
                    for a in a_min..=m {
                        let ka = response(j, i, a).unwrap();
                        for b in a.saturating_sub(1)..=(a + 1).min(m) {
                            if let (Some(kb), Some(w)) = (response(jp, ip, b), pair_weight(a, b)) {
                                acc += w * gram[j][jp][(ka, kb)];
                            }
                        }
                    }
                    h[(row, col)] = acc;
                    h[(col, row)] = acc;
                }
            }
        }
    }

    let mut g = DVector::<f64>::zeros(dim);
    for j in 0..n {
        for i in 0..m {
            let mut acc = 0.0;
            for b in (i + 1)..=m {
                let kb = response(j, i, b).unwrap();
                for a in b.saturating_sub(1)..=(b + 1).min(m) {
                    if let Some(w) = pair_weight(a, b) {
                        acc += w * cross[j][(a, kb)];
                    }
                }
            }
            g[j * m + i] = acc;
        }
    }

    let mut c = 0.0;
    for a in 0..=m {
        c += w_diag(a) * dot(&base_err[a], &m_base_err[a]);
        if a < m {
            c += 2.0 * w_off * dot(&base_err[a], &m_base_err[a + 1]);
        }
    }
    c *= 0.5;

    // Tikhonov term (α/2)·dt·Σ (u - ½)².
    let alpha = instance.alpha();
    if alpha > 0.0 {
        for k in 0..dim {
            h[(k, k)] += alpha * dt;
            g[k] -= 0.5 * alpha * dt;
        }
        c += alpha * dt * dim as f64 / 8.0;
    }

    Ok(ReducedQuadratic { h, g, c })
}
