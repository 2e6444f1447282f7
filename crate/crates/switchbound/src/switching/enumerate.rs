//! Exhaustive enumeration of feasible binary patterns (test oracle and
//! exact-solver workhorse at small sizes).

use super::constraint::{check_dwell, BinaryPattern, SwitchingConstraint};
use super::SwitchError;
use crate::fem::TimeGrid;

pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// All feasible binary patterns in lexicographic order (interval-major,
/// switch 0 most significant). Fails once more than `cap` patterns exist.
pub fn enumerate_patterns(
    constraint: &SwitchingConstraint,
    grid: &TimeGrid,
    cap: usize,
) -> Result<Vec<BinaryPattern>, SwitchError> {
    let m = grid.n_intervals();
    match constraint {
        SwitchingConstraint::Bounded(b) => {
            let mut out = Vec::new();
            let mut stack: Vec<u32> = Vec::with_capacity(m);
            enum_bounded(b, m, &mut stack, 0, &mut out, cap)?;
            Ok(out)
        }
        SwitchingConstraint::DwellTime { min_gap } => {
            check_dwell(*min_gap, grid)?;
            let mut out = Vec::new();
            let mut stack: Vec<u32> = Vec::with_capacity(m);
            enum_dwell(m, grid.dt(), *min_gap, &mut stack, &mut out, cap)?;
            Ok(out)
        }
    }
}

fn enum_bounded(
    b: &super::BoundedSwitchings,
    m: usize,
    stack: &mut Vec<u32>,
    used: usize,
    out: &mut Vec<BinaryPattern>,
    cap: usize,
) -> Result<(), SwitchError> {
    if stack.len() == m {
        if out.len() >= cap {
            return Err(SwitchError::CapExceeded { cap });
        }
        out.push(BinaryPattern::new(b.n(), stack.clone()));
        return Ok(());
    }
    let prev = if stack.is_empty() {
        if b.leading_zero() {
            Some(0u32)
        } else {
            None
        }
    } else {
        stack.last().copied()
    };
    for &col in b.columns() {
        let extra = match prev {
            Some(p) => (p ^ col).count_ones() as usize,
            None => 0,
        };
        if used + extra <= b.sigma_max() {
            stack.push(col);
            enum_bounded(b, m, stack, used + extra, out, cap)?;
            stack.pop();
        }
    }
    Ok(())
}

fn enum_dwell(
    m: usize,
    dt: f64,
    min_gap: f64,
    stack: &mut Vec<u32>,
    out: &mut Vec<BinaryPattern>,
    cap: usize,
) -> Result<(), SwitchError> {
    if stack.len() == m {
        if out.len() >= cap {
            return Err(SwitchError::CapExceeded { cap });
        }
        out.push(BinaryPattern::new(1, stack.clone()));
        return Ok(());
    }
    for v in [0u32, 1u32] {
        if let Some(&prev) = stack.last() {
            if v != prev && !completed_run_ok(stack, dt, min_gap) {
                continue;
            }
        }
        stack.push(v);
        enum_dwell(m, dt, min_gap, stack, out, cap)?;
        stack.pop();
    }
    Ok(())
}

/// When flipping after `stack`, the just-completed run must respect the dwell
/// time unless it is the first run.
fn completed_run_ok(stack: &[u32], dt: f64, min_gap: f64) -> bool {
    let last = *stack.last().unwrap();
    let mut run = 0usize;
    for &v in stack.iter().rev() {
        if v == last {
            run += 1;
        } else {
            break;
        }
    }
    if run == stack.len() {
        return true; // first run, exempt
    }
    run as f64 * dt >= min_gap - 1e-12
}
