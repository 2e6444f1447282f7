//! Exact linear minimization over the bounded-switching patterns.
//!
//! Dynamic program over (interval, current column, switchings used); the
//! leading-zero convention charges the first column's weight. Ties are broken
//! toward fewer switchings, then the lexicographically smallest pattern.

use super::constraint::{BinaryPattern, BoundedSwitchings};
use super::{SwitchError, LMO_CELL_GUARD};

/// `(cost, switchings)` ordered lexicographically.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Objective {
    cost: f64,
    switches: u32,
}

const INFEASIBLE: Objective = Objective {
    cost: f64::INFINITY,
    switches: u32::MAX,
};

impl Objective {
    fn better_than(&self, other: &Objective) -> bool {
        self.cost < other.cost || (self.cost == other.cost && self.switches < other.switches)
    }
}

/// Exact minimizer of `Σ c·v` over all feasible patterns.
///
/// `cost` is switch-major (`c[j*m + i]`).
pub fn lmo_bounded(
    cost: &[f64],
    constraint: &BoundedSwitchings,
    m: usize,
) -> Result<(BinaryPattern, f64), SwitchError> {
    lmo_bounded_with_prefix(cost, constraint, m, &[])
}

/// [`lmo_bounded`] with the first `prefix.len()` columns pinned; used for
/// branch-and-bound node bounds.
pub fn lmo_bounded_with_prefix(
    cost: &[f64],
    constraint: &BoundedSwitchings,
    m: usize,
    prefix: &[u32],
) -> Result<(BinaryPattern, f64), SwitchError> {
    let n = constraint.n();
    assert_eq!(cost.len(), n * m, "cost must be n x m");
    assert!(prefix.len() <= m);
    let cols = constraint.columns();
    let n_cols = cols.len();
    let budget = constraint.sigma_max();
    let cells = (m + 1) * n_cols * (budget + 1);
    if cells > LMO_CELL_GUARD {
        return Err(SwitchError::ResourceGuard {
            cells,
            cap: LMO_CELL_GUARD,
        });
    }

    // Prefix must itself be feasible.
    for &c in prefix {
        if !constraint.allows_column(c) {
            return Err(SwitchError::InfeasiblePrefix);
        }
    }
    let prefix_switches = constraint.switch_count(prefix);
    if prefix_switches > budget {
        return Err(SwitchError::InfeasiblePrefix);
    }

    // Stage cost of a column at interval i.
    let col_cost = |i: usize, mask: u32| -> f64 {
        let mut s = 0.0;
        let mut bits = mask;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            s += cost[j * m + i];
            bits &= bits - 1;
        }
        s
    };

    let k0 = prefix.len();
    let prefix_cost: f64 = prefix
        .iter()
        .enumerate()
        .map(|(i, &c)| col_cost(i, c))
        .sum();

    // suffix[i][w][r]: best completion of intervals i..m given the column of
    // interval i-1 is cols[w] and r switchings remain.
    let idx = |i: usize, w: usize, r: usize| (i * n_cols + w) * (budget + 1) + r;
    let mut suffix = vec![INFEASIBLE; (m + 1 - k0) * n_cols * (budget + 1)];
    let base = k0; // suffix index offset
    for w in 0..n_cols {
        for r in 0..=budget {
            suffix[idx(m - base, w, r)] = Objective {
                cost: 0.0,
                switches: 0,
            };
        }
    }
    for i in (k0..m).rev() {
        for w in 0..n_cols {
            for r in 0..=budget {
                let mut best = INFEASIBLE;
                for (wn, &cn) in cols.iter().enumerate() {
                    let d = (cols[w] ^ cn).count_ones() as usize;
                    if d > r {
                        continue;
                    }
                    let tail = suffix[idx(i + 1 - base, wn, r - d)];
                    if tail.cost.is_infinite() {
                        continue;
                    }
                    let cand = Objective {
                        cost: col_cost(i, cn) + tail.cost,
                        switches: d as u32 + tail.switches,
                    };
                    if cand.better_than(&best) {
                        best = cand;
                    }
                }
                suffix[idx(i - base, w, r)] = best;
            }
        }
    }

    // Entry step: the column preceding interval k0 is the last prefix column,
    // the implicit zero state (leading_zero), or free.
    let remaining = budget - prefix_switches;
    let prev_mask: Option<u32> = if k0 > 0 {
        Some(prefix[k0 - 1])
    } else if constraint.leading_zero() {
        Some(0)
    } else {
        None
    };

    let first_step = |wn: usize| -> Option<Objective> {
        if k0 == m {
            return Some(Objective {
                cost: 0.0,
                switches: 0,
            });
        }
        let cn = cols[wn];
        let d = match prev_mask {
            Some(p) => (p ^ cn).count_ones() as usize,
            None => 0,
        };
        if d > remaining {
            return None;
        }
        let tail = suffix[idx(k0 + 1 - base, wn, remaining - d)];
        if tail.cost.is_infinite() {
            return None;
        }
        Some(Objective {
            cost: col_cost(k0, cn) + tail.cost,
            switches: d as u32 + tail.switches,
        })
    };

    let mut columns: Vec<u32> = prefix.to_vec();
    let mut value = prefix_cost;
    if k0 < m {
        let mut best = INFEASIBLE;
        for wn in 0..n_cols {
            if let Some(cand) = first_step(wn) {
                if cand.better_than(&best) {
                    best = cand;
                }
            }
        }
        debug_assert!(best.cost.is_finite());
        // Reconstruct forward, taking the lexicographically smallest column
        // that attains the optimal (cost, switchings) pair at every step.
        let mut target = best;
        let mut r = remaining;
        let mut prev = prev_mask;
        for i in k0..m {
            let mut chosen = None;
            for (wn, &cn) in cols.iter().enumerate() {
                let d = match prev {
                    Some(p) => (p ^ cn).count_ones() as usize,
                    None => 0,
                };
                if d > r {
                    continue;
                }
                let tail = suffix[idx(i + 1 - base, wn, r - d)];
                if tail.cost.is_infinite() {
                    continue;
                }
                let cand = Objective {
                    cost: col_cost(i, cn) + tail.cost,
                    switches: d as u32 + tail.switches,
                };
                if cand.cost == target.cost && cand.switches == target.switches {
                    chosen = Some((wn, cn, d, tail));
                    break;
                }
            }
            let (_, cn, d, tail) = chosen.expect("DP reconstruction must find its own optimum");
            columns.push(cn);
            value += col_cost(i, cn);
            r -= d;
            prev = Some(cn);
            target = tail;
        }
    }
    Ok((BinaryPattern::new(n, columns), value))
}

/// Feasible binary pattern closest to a relaxed point in Euclidean norm.
///
/// `‖v - ū‖²` is linear in binary `v`, so this is exactly the LMO with cost
/// `1 - 2ū`.
pub fn nearest_feasible(
    relaxed: &[f64],
    constraint: &BoundedSwitchings,
    m: usize,
) -> Result<BinaryPattern, SwitchError> {
    let cost: Vec<f64> = relaxed.iter().map(|&u| 1.0 - 2.0 * u).collect();
    Ok(lmo_bounded(&cost, constraint, m)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_costs_yield_all_zero() {
        let c = BoundedSwitchings::all_columns(1, 2, true);
        let cost = vec![0.3, 0.1, 2.0, 0.7];
        let (p, v) = lmo_bounded(&cost, &c, 4).unwrap();
        assert!(p.columns().iter().all(|&x| x == 0));
        assert_eq!(v, 0.0);
    }

    #[test]
    fn all_negative_costs_switch_once_to_ones() {
        let c = BoundedSwitchings::all_columns(1, 2, true);
        let cost = vec![-1.0, -1.0, -1.0, -1.0];
        let (p, v) = lmo_bounded(&cost, &c, 4).unwrap();
        assert!(p.columns().iter().all(|&x| x == 1));
        assert_eq!(v, -4.0);
    }

    #[test]
    fn alternating_costs_hand_case() {
        // Exhaustive check over all <= 2-switch patterns gives -1.
        let c = BoundedSwitchings::all_columns(1, 2, true);
        let cost = vec![1.0, -1.0, 1.0, -1.0, 1.0];
        let (p, v) = lmo_bounded(&cost, &c, 5).unwrap();
        assert_eq!(v, -1.0);
        // Tie broken to fewest switchings, then lexicographically smallest:
        // the single block {4} (0-based interval 3).
        assert_eq!(p.columns(), &[0, 0, 0, 1, 0]);
    }

    #[test]
    fn prefix_pinning_accounts_for_prefix_switches() {
        let c = BoundedSwitchings::all_columns(1, 2, true);
        let cost = vec![0.0, 0.0, -5.0, -5.0];
        // Prefix 1,0 burns both switchings: the suffix cannot switch on again.
        let (p, v) = lmo_bounded_with_prefix(&cost, &c, 4, &[1, 0]).unwrap();
        assert_eq!(p.columns(), &[1, 0, 0, 0]);
        assert_eq!(v, 0.0);
        // With one switching left the block turns on and stays.
        let (p2, v2) = lmo_bounded_with_prefix(&cost, &c, 4, &[0, 0]).unwrap();
        assert_eq!(p2.columns(), &[0, 0, 1, 1]);
        assert_eq!(v2, -10.0);
    }

    #[test]
    fn infeasible_prefix_is_an_error() {
        let c = BoundedSwitchings::all_columns(1, 1, true);
        let cost = vec![0.0; 4];
        assert!(matches!(
            lmo_bounded_with_prefix(&cost, &c, 4, &[1, 0]),
            Err(SwitchError::InfeasiblePrefix)
        ));
    }

    #[test]
    fn nearest_feasible_keeps_feasible_binaries() {
        let c = BoundedSwitchings::all_columns(1, 2, true);
        let point = [0.0, 1.0, 1.0, 0.0];
        let p = nearest_feasible(&point, &c, 4).unwrap();
        assert_eq!(p.columns(), &[0, 1, 1, 0]);
    }

    #[test]
    fn nearest_feasible_rounds_constant_above_half_to_ones() {
        let c = BoundedSwitchings::all_columns(1, 1, true);
        let point = [0.6, 0.6, 0.6];
        let p = nearest_feasible(&point, &c, 3).unwrap();
        assert_eq!(p.columns(), &[1, 1, 1]);
    }

    #[test]
    fn resource_guard_trips() {
        let c = BoundedSwitchings::all_columns(16, 40, true);
        let cost = vec![0.0; 16 * 64];
        assert!(matches!(
            lmo_bounded(&cost, &c, 64),
            Err(SwitchError::ResourceGuard { .. })
        ));
    }
}
