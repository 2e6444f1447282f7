//! Uniform time grid shared by the control discretization and the projection.

use super::FemError;

/// Uniform partition of `[0, T]` into `m` intervals.
///
/// Interval `i` (zero-based) is `[i*dt, (i+1)*dt]`; controls are piecewise
/// constant per interval, states piecewise linear between the `m + 1` nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    m: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(horizon: f64, m: usize) -> Result<Self, FemError> {
        if !(horizon > 0.0) {
            return Err(FemError::InvalidParameter {
                field: "horizon",
                message: format!("final time must be positive, got {horizon}"),
            });
        }
        if m < 1 {
            return Err(FemError::InvalidParameter {
                field: "m",
                message: "need at least one time interval".into(),
            });
        }
        Ok(TimeGrid {
            horizon,
            m,
            dt: horizon / m as f64,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_intervals(&self) -> usize {
        self.m
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Time of node `k`, `k = 0..=m`.
    pub fn node(&self, k: usize) -> f64 {
        if k == self.m {
            self.horizon
        } else {
            k as f64 * self.dt
        }
    }

    /// `[start, end]` of interval `i`, `i = 0..m`.
    pub fn interval(&self, i: usize) -> (f64, f64) {
        (self.node(i), self.node(i + 1))
    }

    /// Length of the overlap of interval `i` with `[a, b]`, divided by `dt`.
    pub fn overlap_fraction(&self, i: usize, a: f64, b: f64) -> f64 {
        let (lo, hi) = self.interval(i);
        let len = (b.min(hi) - a.max(lo)).max(0.0);
        len / self.dt
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals_cover_horizon() {
        let g = TimeGrid::new(2.0, 8).unwrap();
        assert_eq!(g.dt(), 0.25);
        let mut end = 0.0;
        for i in 0..8 {
            let (a, b) = g.interval(i);
            assert!((a - end).abs() < 1e-15);
            assert!((b - a - g.dt()).abs() < 1e-15);
            end = b;
        }
        assert_eq!(end, 2.0);
    }

    #[test]
    fn overlap_fraction_clips() {
        let g = TimeGrid::new(3.0, 3).unwrap();
        assert_eq!(g.overlap_fraction(0, 0.0, 3.0), 1.0);
        assert!((g.overlap_fraction(2, 2.5, 3.0) - 0.5).abs() < 1e-15);
        assert_eq!(g.overlap_fraction(1, 2.5, 3.0), 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(TimeGrid::new(0.0, 4).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
    }
}
