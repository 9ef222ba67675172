use alloc::vec::Vec;

use crate::math::powf;

use super::{OrliczFunction, YoungFunction};

const GRID_POINTS: usize = 1000;
const GRID_LO: f64 = 1e-6;
const GRID_HI: f64 = 1e6;
const MONO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Nonincreasing; a constant ratio passes.
    Decreasing,
    /// Nondecreasing.
    Increasing,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RegularityReport {
    pub holds: bool,
    /// First consecutive pair `(s, t)`, `s < t`, where `f(t)/t^p` moves the
    /// wrong way.
    pub violation: Option<(f64, f64)>,
}

/// Geometric grid on `[1e-6, 1e6]` plus every positive kink of `f`, skipping
/// points outside a bounded domain.
pub fn regularity_grid(f: &OrliczFunction) -> Vec<f64> {
    let step = libm::log(GRID_HI / GRID_LO) / (GRID_POINTS - 1) as f64;
    let mut grid: Vec<f64> = (0..GRID_POINTS)
        .map(|k| GRID_LO * libm::exp(step * k as f64))
        .chain(f.kinks().into_iter().filter(|&t| t > 0.0))
        .filter(|&t| f.value(t).is_finite())
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Checks whether `f(t)/t^p` is monotone in the requested direction on the
/// [`regularity_grid`].
pub fn check_regularity(f: &OrliczFunction, p: f64, direction: Direction) -> RegularityReport {
    let grid = regularity_grid(f);
    let ratio = |t: f64| f.value(t) / powf(t, p);
    let mut prev = (grid[0], ratio(grid[0]));
    for &t in &grid[1..] {
        let g = ratio(t);
        let slack = MONO_TOL * g.abs().max(prev.1.abs());
        let bad = match direction {
            Direction::Decreasing => g > prev.1 + slack,
            Direction::Increasing => g < prev.1 - slack,
        };
        if bad {
            return RegularityReport {
                holds: false,
                violation: Some((prev.0, t)),
            };
        }
        prev = (t, g);
    }
    RegularityReport {
        holds: true,
        violation: None,
    }
}
