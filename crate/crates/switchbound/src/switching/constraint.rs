//! Switching constraints and binary patterns.

use super::SwitchError;
use crate::fem::{ControlVector, TimeGrid};

/// Bounded total number of switchings with an explicit set of allowed
/// per-interval state vectors.
///
/// Columns are bitmasks over the `n` switches (bit `j` = switch `j` on).
/// With `leading_zero` set the control is fixed to the all-zero state before
/// `t = 0`, so a nonzero first column already counts switches.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundedSwitchings {
    n: usize,
    sigma_max: usize,
    columns: Vec<u32>,
    leading_zero: bool,
}

/// Lexicographic key of a column: switch 0 is the most significant row.
pub(super) fn column_lex_key(mask: u32, n: usize) -> u32 {
    let mut key = 0;
    for j in 0..n {
        if mask & (1 << j) != 0 {
            key |= 1 << (n - 1 - j);
        }
    }
    key
}

impl BoundedSwitchings {
    pub fn new(
        n: usize,
        sigma_max: usize,
        mut columns: Vec<u32>,
        leading_zero: bool,
    ) -> Result<Self, SwitchError> {
        if columns.is_empty() {
            return Err(SwitchError::EmptyColumnSet);
        }
        for &c in &columns {
            if n >= 32 || c >= (1u32 << n) {
                return Err(SwitchError::InvalidColumn { mask: c, n });
            }
        }
        columns.sort_by_key(|&c| column_lex_key(c, n));
        columns.dedup();
        Ok(BoundedSwitchings {
            n,
            sigma_max,
            columns,
            leading_zero,
        })
    }

    /// The unrestricted column set `{0,1}^n`.
    pub fn all_columns(n: usize, sigma_max: usize, leading_zero: bool) -> Self {
        let columns = (0u32..(1 << n)).collect();
        BoundedSwitchings::new(n, sigma_max, columns, leading_zero).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma_max(&self) -> usize {
        self.sigma_max
    }

    /// Allowed columns, sorted lexicographically (switch 0 most significant).
    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    pub fn leading_zero(&self) -> bool {
        self.leading_zero
    }

    pub fn allows_column(&self, mask: u32) -> bool {
        self.columns.contains(&mask)
    }

    /// Whether the column set is the full hypercube `{0,1}^n`.
    pub fn has_full_column_set(&self) -> bool {
        self.columns.len() == 1 << self.n
    }

    /// Total switch count of a column sequence, including the initial
    /// transition from the all-zero state when `leading_zero` is set.
    pub fn switch_count(&self, columns: &[u32]) -> usize {
        let mut count = 0usize;
        let mut prev = if self.leading_zero { Some(0u32) } else { None };
        for &c in columns {
            if let Some(p) = prev {
                count += (p ^ c).count_ones() as usize;
            }
            prev = Some(c);
        }
        count
    }
}

/// Tagged switching constraint: bounded switchings or a minimum dwell time.
#[derive(Clone, Debug, PartialEq)]
pub enum SwitchingConstraint {
    Bounded(BoundedSwitchings),
    /// Minimum time between two consecutive switchings; single switch only.
    DwellTime { min_gap: f64 },
}

impl SwitchingConstraint {
    pub fn as_bounded(&self) -> Option<&BoundedSwitchings> {
        match self {
            SwitchingConstraint::Bounded(b) => Some(b),
            SwitchingConstraint::DwellTime { .. } => None,
        }
    }
}

pub(super) fn check_dwell(min_gap: f64, grid: &TimeGrid) -> Result<(), SwitchError> {
    if !(min_gap > 0.0) || min_gap > grid.horizon() + 1e-12 {
        return Err(SwitchError::InvalidDwell {
            dwell: min_gap,
            horizon: grid.horizon(),
        });
    }
    Ok(())
}

/// An `n x m` binary switching pattern, one column (state vector) per time
/// interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryPattern {
    n: usize,
    columns: Vec<u32>,
}

impl BinaryPattern {
    pub fn new(n: usize, columns: Vec<u32>) -> Self {
        debug_assert!(columns.iter().all(|&c| n >= 32 || c < (1 << n)));
        BinaryPattern { n, columns }
    }

    /// Single-switch pattern from 0/1 interval values.
    pub fn single(values: &[u8]) -> Self {
        BinaryPattern {
            n: 1,
            columns: values.iter().map(|&v| u32::from(v != 0)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    pub fn get(&self, j: usize, i: usize) -> bool {
        self.columns[i] & (1 << j) != 0
    }

    pub fn to_control(&self) -> ControlVector {
        let mut u = ControlVector::zeros(self.n, self.m());
        for i in 0..self.m() {
            for j in 0..self.n {
                if self.get(j, i) {
                    u.set(j, i, 1.0);
                }
            }
        }
        u
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.to_control().into_flat()
    }

    /// Interval-major lexicographic key (switch 0 most significant within a
    /// column); used for deterministic tie-breaking.
    pub fn lex_key(&self) -> Vec<u32> {
        self.columns
            .iter()
            .map(|&c| column_lex_key(c, self.n))
            .collect()
    }
}

impl PartialOrd for BinaryPattern {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BinaryPattern {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.lex_key().cmp(&other.lex_key())
    }
}

/// Feasibility of a binary pattern for a switching constraint.
///
/// Bounded variant: every column allowed and total switch count within
/// budget. Dwell variant: the pattern is realizable by switching times at
/// run boundaries, i.e. every run except possibly the first and last lasts
/// at least the dwell time.
pub fn feasible(
    constraint: &SwitchingConstraint,
    v: &BinaryPattern,
    grid: &TimeGrid,
) -> Result<bool, SwitchError> {
    if v.m() != grid.n_intervals() {
        return Err(SwitchError::DimensionMismatch {
            expected: (v.n(), grid.n_intervals()),
            got: (v.n(), v.m()),
        });
    }
    match constraint {
        SwitchingConstraint::Bounded(b) => {
            if v.n() != b.n() {
                return Err(SwitchError::DimensionMismatch {
                    expected: (b.n(), grid.n_intervals()),
                    got: (v.n(), v.m()),
                });
            }
            if !v.columns().iter().all(|&c| b.allows_column(c)) {
                return Ok(false);
            }
            Ok(b.switch_count(v.columns()) <= b.sigma_max())
        }
        SwitchingConstraint::DwellTime { min_gap } => {
            if v.n() != 1 {
                return Err(SwitchError::DwellNeedsSingleSwitch { n: v.n() });
            }
            check_dwell(*min_gap, grid)?;
            Ok(dwell_runs_feasible(v.columns(), grid.dt(), *min_gap))
        }
    }
}

pub(super) fn dwell_runs_feasible(columns: &[u32], dt: f64, min_gap: f64) -> bool {
    let mut runs: Vec<usize> = Vec::new();
    let mut cur = columns[0];
    let mut len = 1usize;
    for &c in &columns[1..] {
        if c == cur {
            len += 1;
        } else {
            runs.push(len);
            cur = c;
            len = 1;
        }
    }
    runs.push(len);
    // Interior runs must last at least the dwell time; boundary runs may be
    // cut short by the horizon.
    runs.iter()
        .skip(1)
        .take(runs.len().saturating_sub(2))
        .all(|&r| r as f64 * dt >= min_gap - 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(horizon: f64, m: usize) -> TimeGrid {
        TimeGrid::new(horizon, m).unwrap()
    }

    #[test]
    fn all_zero_is_always_feasible() {
        let g = grid(2.0, 5);
        let v = BinaryPattern::single(&[0, 0, 0, 0, 0]);
        let bounded =
            SwitchingConstraint::Bounded(BoundedSwitchings::all_columns(1, 0, true));
        assert!(feasible(&bounded, &v, &g).unwrap());
        let dwell = SwitchingConstraint::DwellTime { min_gap: 1.0 };
        assert!(feasible(&dwell, &v, &g).unwrap());
    }

    #[test]
    fn switch_count_honors_leading_zero() {
        let g = grid(1.0, 5);
        let v = BinaryPattern::single(&[0, 1, 0, 1, 0]);
        let c2 = SwitchingConstraint::Bounded(BoundedSwitchings::all_columns(1, 2, true));
        assert!(!feasible(&c2, &v, &g).unwrap(), "four switchings exceed 2");
        let c4 = SwitchingConstraint::Bounded(BoundedSwitchings::all_columns(1, 4, true));
        assert!(feasible(&c4, &v, &g).unwrap());
        // Starting high costs one switch under leading_zero.
        let ones = BinaryPattern::single(&[1, 1, 1, 1, 1]);
        let c0 = SwitchingConstraint::Bounded(BoundedSwitchings::all_columns(1, 0, true));
        assert!(!feasible(&c0, &ones, &g).unwrap());
        let c0_free =
            SwitchingConstraint::Bounded(BoundedSwitchings::all_columns(1, 0, false));
        assert!(feasible(&c0_free, &ones, &g).unwrap());
    }

    #[test]
    fn conflict_columns_are_rejected() {
        let g = grid(1.0, 2);
        // Never both switches on.
        let b = BoundedSwitchings::new(2, 2, vec![0b00, 0b01, 0b10], true).unwrap();
        let c = SwitchingConstraint::Bounded(b);
        let ok = BinaryPattern::new(2, vec![0b01, 0b10]);
        let bad = BinaryPattern::new(2, vec![0b01, 0b11]);
        assert!(feasible(&c, &ok, &g).unwrap());
        assert!(!feasible(&c, &bad, &g).unwrap());
    }

    #[test]
    fn dwell_run_lengths_with_boundary_exemption() {
        let g = grid(2.0, 4); // dt = 0.5
        let c = SwitchingConstraint::DwellTime { min_gap: 1.5 };
        assert!(feasible(&c, &BinaryPattern::single(&[1, 1, 1, 0]), &g).unwrap());
        assert!(!feasible(&c, &BinaryPattern::single(&[1, 0, 1, 1]), &g).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let g = grid(1.0, 3);
        let c = SwitchingConstraint::Bounded(BoundedSwitchings::all_columns(1, 2, true));
        let v = BinaryPattern::single(&[0, 1]);
        assert!(matches!(
            feasible(&c, &v, &g),
            Err(SwitchError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lex_order_puts_switch_zero_first() {
        let a = BinaryPattern::new(2, vec![0b01, 0b00]); // switch 0 on first
        let b = BinaryPattern::new(2, vec![0b10, 0b00]); // switch 1 on first
        assert!(a > b, "switch 0 is the most significant row");
        let c = BinaryPattern::single(&[0, 0, 1]);
        let d = BinaryPattern::single(&[0, 1, 0]);
        assert!(c < d);
    }
}
