//! Exact separation of alternating inequalities.
//!
//! For a single switch with at most `sigma_max` switchings (first value fixed
//! to zero, either through the implicit leading-zero state or the first
//! variable), the projected feasible hull is completely described by the box
//! together with inequalities
//!
//! ```text
//!     Σ_k (-1)^{k+1} v_{i_k}  <=  floor(sigma_max / 2)
//! ```
//!
//! over increasing index sequences with `q > sigma_max`, `q - sigma_max` odd.
//! The most violated member is found by a dynamic program over (position,
//! selection count), where counts beyond `sigma_max + 1` only matter modulo
//! two. Runtime O(n·m) for fixed `sigma_max`.

use super::constraint::BoundedSwitchings;

/// Violation threshold below which a point is declared separated-free.
pub const EPS_SEP: f64 = 1e-8;

/// One alternating inequality: coefficient `(-1)^{k+1}` on `v_{j, i_k}`,
/// right-hand side `floor(sigma_max / 2)`. Indices are 1-based intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct AlternatingCut {
    pub switch: usize,
    pub indices: Vec<usize>,
    pub rhs: i64,
}

impl AlternatingCut {
    /// `Σ_k (-1)^{k+1} v_{j,i_k} - rhs` for a switch-major flattened point.
    pub fn violation(&self, point: &[f64], m: usize) -> f64 {
        let mut s = 0.0;
        let mut sign = 1.0;
        for &i in &self.indices {
            s += sign * point[self.switch * m + (i - 1)];
            sign = -sign;
        }
        s - self.rhs as f64
    }

    /// Sparse row `a` and right-hand side `b` of `aᵀ v <= b` over the
    /// flattened control.
    pub fn as_row(&self, m: usize) -> (Vec<(usize, f64)>, f64) {
        let coeffs = self
            .indices
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                (
                    self.switch * m + (i - 1),
                    if k % 2 == 0 { 1.0 } else { -1.0 },
                )
            })
            .collect();
        (coeffs, self.rhs as f64)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Best {
    value: f64,
    picks: u32,
}

const NONE: Best = Best {
    value: f64::NEG_INFINITY,
    picks: u32::MAX,
};

impl Best {
    fn better_than(&self, other: &Best) -> bool {
        self.value > other.value || (self.value == other.value && self.picks < other.picks)
    }
}

/// Most violated alternating cut for one switch, or `None` when every
/// admissible sequence has violation at most `EPS_SEP`.
///
/// `eligible` holds the values indexable by the cut; `first_index` is the
/// 1-based interval index of `eligible[0]`.
fn separate_switch(
    eligible: &[f64],
    sigma_max: usize,
    first_index: usize,
) -> Option<(Vec<usize>, f64)> {
    let k = eligible.len();
    let admissible = sigma_max + 1; // saturated state with q > sigma, parity odd
    let n_states = sigma_max + 3;
    if k < admissible {
        return None;
    }
    let next_state = |s: usize| -> usize {
        if s + 1 <= sigma_max + 2 {
            s + 1
        } else {
            sigma_max + 1
        }
    };
    // Sign of the (s+1)-th selected element: positive at even counts. The
    // saturated states preserve count parity, so s % 2 decides throughout.
    let sign = |s: usize| -> f64 {
        if s % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };

    // suffix[t][s]: best (value, picks) over selections from t.. that end in
    // the admissible state.
    let idx = |t: usize, s: usize| t * n_states + s;
    let mut suffix = vec![NONE; (k + 1) * n_states];
    suffix[idx(k, admissible)] = Best {
        value: 0.0,
        picks: 0,
    };
    for t in (0..k).rev() {
        for s in 0..n_states {
            let mut best = suffix[idx(t + 1, s)]; // skip element t
            let take_tail = suffix[idx(t + 1, next_state(s))];
            if take_tail.value.is_finite() {
                let cand = Best {
                    value: sign(s) * eligible[t] + take_tail.value,
                    picks: take_tail.picks + 1,
                };
                if cand.better_than(&best) {
                    best = cand;
                }
            }
            suffix[idx(t, s)] = best;
        }
    }
    let overall = suffix[idx(0, 0)];
    if !overall.value.is_finite() {
        return None;
    }
    // Forward reconstruction: taking the earliest index that attains the
    // optimal (value, picks) pair yields the shortest, lexicographically
    // smallest optimal sequence.
    let mut indices = Vec::with_capacity(overall.picks as usize);
    let mut state = 0usize;
    let mut target = overall;
    for t in 0..k {
        if target.picks == 0 {
            break;
        }
        let take_tail = suffix[idx(t + 1, next_state(state))];
        if take_tail.value.is_finite() {
            let v = sign(state) * eligible[t] + take_tail.value;
            if v == target.value && take_tail.picks + 1 == target.picks {
                indices.push(first_index + t);
                state = next_state(state);
                target = take_tail;
            }
        }
    }
    Some((indices, overall.value))
}

/// Most violated alternating cut across all switches, or `None` when every
/// cut has violation at most [`EPS_SEP`].
///
/// With `leading_zero` the implicit zero state precedes interval 1 and cut
/// indices range over `1..=m`; without it the first variable plays the fixed
/// role and indices range over `2..=m`. Cuts are valid per switch for any
/// column set; the description is complete for `U = {0,1}^n`.
pub fn separate_alternating(
    point: &[f64],
    constraint: &BoundedSwitchings,
    m: usize,
) -> Option<AlternatingCut> {
    let n = constraint.n();
    assert_eq!(point.len(), n * m);
    let rhs = (constraint.sigma_max() / 2) as i64;
    let mut best: Option<(AlternatingCut, f64)> = None;
    for j in 0..n {
        let row = &point[j * m..(j + 1) * m];
        let (eligible, first_index) = if constraint.leading_zero() {
            (row, 1)
        } else {
            if m < 2 {
                continue;
            }
            (&row[1..], 2)
        };
        if let Some((indices, value)) = separate_switch(eligible, constraint.sigma_max(), first_index)
        {
            let violation = value - rhs as f64;
            if violation > EPS_SEP {
                let better = match &best {
                    Some((_, v)) => violation > *v,
                    None => true,
                };
                if better {
                    best = Some((
                        AlternatingCut {
                            switch: j,
                            indices,
                            rhs,
                        },
                        violation,
                    ));
                }
            }
        }
    }
    best.map(|(cut, _)| cut)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(sigma: usize, leading_zero: bool) -> BoundedSwitchings {
        BoundedSwitchings::all_columns(1, sigma, leading_zero)
    }

    #[test]
    fn midpoint_half_profile_is_cut() {
        // One switch, sigma = 1: the half-height middle block violates the
        // two-index alternating inequality by exactly 1/2.
        let mut point = vec![0.0; 12];
        for i in 4..8 {
            point[i] = 0.5;
        }
        let cut = separate_alternating(&point, &full(1, true), 12).unwrap();
        assert_eq!(cut.indices, vec![5, 9]);
        assert_eq!(cut.rhs, 0);
        assert!((cut.violation(&point, 12) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn alternating_vertex_with_budget_two_is_cut() {
        let point = vec![0.0, 1.0, 0.0, 1.0, 0.0];
        let cut = separate_alternating(&point, &full(2, true), 5).unwrap();
        assert_eq!(cut.indices, vec![2, 3, 4]);
        assert_eq!(cut.rhs, 1);
        assert!((cut.violation(&point, 5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn feasible_binaries_are_never_cut() {
        use crate::fem::TimeGrid;
        use crate::switching::{enumerate_patterns, SwitchingConstraint};
        let grid = TimeGrid::new(1.0, 6).unwrap();
        for sigma in 0..4 {
            let c = full(sigma, true);
            let pats = enumerate_patterns(
                &SwitchingConstraint::Bounded(c.clone()),
                &grid,
                100_000,
            )
            .unwrap();
            for p in pats {
                assert!(
                    separate_alternating(&p.to_flat(), &c, 6).is_none(),
                    "pattern {:?} at sigma {sigma} must be inside the hull",
                    p.columns()
                );
            }
        }
    }

    #[test]
    fn short_sequences_cannot_be_formed() {
        // sigma >= m: no admissible sequence length exists.
        let point = vec![1.0, 0.0, 1.0];
        assert!(separate_alternating(&point, &full(3, true), 3).is_none());
    }

    #[test]
    fn without_leading_zero_indices_start_at_two() {
        // First variable plays the fixed-to-zero role.
        let point = vec![0.9, 0.8, 0.0, 0.8, 0.0];
        let cut = separate_alternating(&point, &full(1, false), 5).unwrap();
        assert!(cut.indices.iter().all(|&i| i >= 2));
    }

    #[test]
    fn reports_most_violated_switch() {
        // Two switches; switch 1 carries the larger violation.
        let mut point = vec![0.0; 12];
        point[2] = 0.6; // switch 0: violation 0.6
        point[6 + 2] = 0.9; // switch 1: violation 0.9
        let c = BoundedSwitchings::all_columns(2, 1, true);
        let cut = separate_alternating(&point, &c, 6).unwrap();
        assert_eq!(cut.switch, 1);
        assert!((cut.violation(&point, 6) - 0.9).abs() < 1e-12);
    }
}
