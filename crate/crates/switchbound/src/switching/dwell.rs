//! Dwell-time constraint: candidate switching points and the exact linear
//! minimization over the projected hull.
//!
//! Vertices of the projected hull are realized by controls whose switching
//! times lie in the finite set `S = [0,T] ∩ (Zs + {interval endpoints})`, so
//! a dynamic program over `(τ ∈ S, value after τ)` minimizes any linear cost
//! exactly. The hull is generally not a 0/1-polytope: optima may project to
//! fractional interval averages.

use super::constraint::check_dwell;
use super::SwitchError;
use crate::fem::TimeGrid;

const TIME_TOL: f64 = 1e-9;

/// Sorted candidate switching times, closed under the defining shifts.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSet {
    points: Vec<f64>,
}

impl CandidateSet {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn index_of(&self, t: f64) -> Option<usize> {
        let i = self
            .points
            .partition_point(|&p| p < t - TIME_TOL);
        if i < self.points.len() && (self.points[i] - t).abs() <= TIME_TOL {
            Some(i)
        } else {
            None
        }
    }
}

/// `S = [0,T] ∩ (Zs + ({0,T} ∪ interval endpoints))`, sorted and deduplicated.
pub fn candidate_points(min_gap: f64, grid: &TimeGrid) -> Result<CandidateSet, SwitchError> {
    check_dwell(min_gap, grid)?;
    let horizon = grid.horizon();
    let mut points = Vec::new();
    let k_max = (horizon / min_gap).ceil() as i64 + 1;
    for i in 0..=grid.n_intervals() {
        let g = grid.node(i);
        for k in -k_max..=k_max {
            let t = g + k as f64 * min_gap;
            if t >= -1e-12 && t <= horizon + 1e-12 {
                points.push(t.clamp(0.0, horizon));
            }
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    Ok(CandidateSet { points })
}

/// Minimizer of a linear cost over the projected dwell-time hull.
#[derive(Clone, Debug)]
pub struct DwellSolution {
    /// Interval averages of the optimal control (possibly fractional).
    pub projection: Vec<f64>,
    pub value: f64,
    /// Control value on `[0, t_1)`.
    pub start_value: u8,
    /// Witness switching times, strictly increasing.
    pub switch_times: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
enum Parent {
    Start,
    /// Keep the value across `[τ_{j-1}, τ_j]`.
    Continue,
    /// Switch at `τ_j`; the previous stretch `[τ_j - s, τ_j]` held `1 - b`
    /// and chains to the given candidate index.
    SwitchFrom(usize),
    /// First switch at `τ_j < s`: constant `1 - b` on `[0, τ_j]`.
    FirstSwitch,
}

/// Exact minimum of `c^T Π(u)` over dwell-time-feasible controls.
///
/// `cost` has one entry per time interval of `grid`.
pub fn lmo_dwell(
    cost: &[f64],
    min_gap: f64,
    grid: &TimeGrid,
) -> Result<DwellSolution, SwitchError> {
    assert_eq!(cost.len(), grid.n_intervals());
    let s = candidate_points(min_gap, grid)?;
    let tau = s.points();
    let r = tau.len();

    // Cost of holding value 1 over [a, b], projected to interval averages.
    let hold_cost = |a: f64, b: f64| -> f64 {
        if b <= a {
            return 0.0;
        }
        let m = grid.n_intervals();
        let i0 = ((a / grid.dt()).floor() as usize).min(m - 1);
        let i1 = ((b / grid.dt()).ceil() as usize).min(m);
        (i0..i1)
            .map(|i| cost[i] * grid.overlap_fraction(i, a, b))
            .sum()
    };
    let stretch_cost = |b: u8, a: f64, t: f64| -> f64 {
        if b == 0 {
            0.0
        } else {
            hold_cost(a, t)
        }
    };

    // value[j][b], parent[j][b]: optimal cost on [0, τ_j] with value b just
    // after τ_j.
    let mut value = vec![[f64::INFINITY; 2]; r];
    let mut parent = vec![[Parent::Start; 2]; r];
    value[0] = [0.0, 0.0];
    for j in 1..r {
        let t = tau[j];
        for b in 0..2usize {
            // Continue with the same value from the previous candidate point.
            let mut best = value[j - 1][b] + stretch_cost(b as u8, tau[j - 1], t);
            let mut par = Parent::Continue;
            if t >= min_gap - TIME_TOL {
                let back = s
                    .index_of(t - min_gap)
                    .expect("candidate set is closed under subtracting the dwell time");
                let cand =
                    value[back][1 - b] + stretch_cost(1 - b as u8, t - min_gap, t);
                if cand < best {
                    best = cand;
                    par = Parent::SwitchFrom(back);
                }
            } else {
                let cand = stretch_cost(1 - b as u8, 0.0, t);
                if cand < best {
                    best = cand;
                    par = Parent::FirstSwitch;
                }
            }
            value[j][b] = best;
            parent[j][b] = par;
        }
    }

    let last = r - 1;
    let best_b = if value[last][0] <= value[last][1] { 0 } else { 1 };
    let best_value = value[last][best_b];

    // Backtrack the switching structure.
    let mut switch_times = Vec::new();
    let mut j = last;
    let mut b = best_b;
    let start_value = loop {
        match parent[j][b] {
            Parent::Start => break b as u8,
            Parent::Continue => j -= 1,
            Parent::SwitchFrom(back) => {
                switch_times.push(tau[j]);
                j = back;
                b = 1 - b;
            }
            Parent::FirstSwitch => {
                switch_times.push(tau[j]);
                break (1 - b) as u8;
            }
        }
    };
    switch_times.reverse();

    // Integrate the witness control into interval averages.
    let m = grid.n_intervals();
    let mut projection = vec![0.0; m];
    let mut t0 = 0.0;
    let mut v = start_value;
    for &t in switch_times.iter().chain(std::iter::once(&grid.horizon())) {
        if v == 1 {
            for i in 0..m {
                projection[i] += grid.overlap_fraction(i, t0, t);
            }
        }
        t0 = t;
        v = 1 - v;
    }

    Ok(DwellSolution {
        projection,
        value: best_value,
        start_value,
        switch_times,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(horizon: f64, m: usize) -> TimeGrid {
        TimeGrid::new(horizon, m).unwrap()
    }

    #[test]
    fn candidate_points_three_halves() {
        let g = grid(3.0, 3);
        let s = candidate_points(1.5, &g).unwrap();
        let expected = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
        assert_eq!(s.len(), expected.len());
        for (a, b) in s.points().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dwell_equal_to_horizon_gives_endpoints() {
        let g = grid(2.0, 4);
        let s = candidate_points(2.0, &g).unwrap();
        let expected = [0.0, 0.5, 1.0, 1.5, 2.0];
        assert_eq!(s.len(), expected.len());
        for (a, b) in s.points().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dt_dividing_dwell_gives_endpoints() {
        // Interval length divides s: every shift lands on an endpoint, the
        // min-up/min-down special case.
        let g = grid(2.0, 4);
        let s = candidate_points(1.0, &g).unwrap();
        let expected = [0.0, 0.5, 1.0, 1.5, 2.0];
        assert_eq!(s.len(), expected.len());
        for (a, b) in s.points().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn nonnegative_costs_stay_off() {
        let g = grid(3.0, 3);
        let sol = lmo_dwell(&[1.0, 0.5, 2.0], 1.5, &g).unwrap();
        assert_eq!(sol.value, 0.0);
        assert!(sol.projection.iter().all(|&p| p == 0.0));
        assert_eq!(sol.start_value, 0);
        assert!(sol.switch_times.is_empty());
    }

    #[test]
    fn nonpositive_costs_stay_on() {
        let g = grid(3.0, 3);
        let sol = lmo_dwell(&[-1.0, -0.5, -2.0], 1.5, &g).unwrap();
        assert!((sol.value + 3.5).abs() < 1e-12);
        assert!(sol.projection.iter().all(|&p| (p - 1.0).abs() < 1e-12));
    }

    #[test]
    fn fractional_vertex_on_three_intervals() {
        // Cost (1, -1, 1/2) with dwell 3/2 on unit intervals: unique optimum
        // is the fractional projection (0, 1, 1/2) with value -3/4.
        let g = grid(3.0, 3);
        let sol = lmo_dwell(&[1.0, -1.0, 0.5], 1.5, &g).unwrap();
        assert!((sol.value + 0.75).abs() < 1e-12, "value {}", sol.value);
        let expected = [0.0, 1.0, 0.5];
        for (a, b) in sol.projection.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(sol.start_value, 0);
        assert_eq!(sol.switch_times.len(), 2);
        assert!((sol.switch_times[0] - 1.0).abs() < 1e-12);
        assert!((sol.switch_times[1] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_dwell() {
        let g = grid(2.0, 4);
        assert!(matches!(
            candidate_points(0.0, &g),
            Err(SwitchError::InvalidDwell { .. })
        ));
        assert!(matches!(
            candidate_points(2.5, &g),
            Err(SwitchError::InvalidDwell { .. })
        ));
    }
}
