//! Sampled right-continuous solutions with two-sided values at jumps.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which one-sided value to read at a jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrajectoryError {
    #[error("t = {t} is outside the sampled range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },
    #[error("trajectory columns have different lengths")]
    Ragged,
    #[error("trajectory grid must be non-empty and strictly increasing (index {0})")]
    BadGrid(usize),
    #[error("left and right values differ at unmarked index {0}")]
    UnmarkedJump(usize),
}

/// Relative tolerance used to snap a query onto a nearby grid time. Keeps
/// left/right lookups at jump times stable under roundoff in the query.
pub const SNAP_REL: f64 = 1e-12;

pub(crate) fn snap_tol(t: f64) -> f64 {
    SNAP_REL * t.abs().max(1.0)
}

/// A piecewise-linear sample of a solution.
///
/// `right[j]` is the stored (right-continuous) value at `grid[j]` and
/// `left[j]` the left limit there. They differ only at indices listed in
/// `marks`, which are the jump times (impulses, or jumps of an initial
/// function). Between two grid times the solution is interpolated linearly
/// from `right[j]` to `left[j + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    origin: f64,
    grid: Vec<f64>,
    right: Vec<f64>,
    left: Vec<f64>,
    marks: Vec<usize>,
}

impl Trajectory {
    /// `origin` is the time where the solution proper starts; earlier grid
    /// times sample the initial function.
    pub fn new(
        origin: f64,
        grid: Vec<f64>,
        right: Vec<f64>,
        left: Vec<f64>,
        mut marks: Vec<usize>,
    ) -> Result<Self, TrajectoryError> {
        if grid.len() != right.len() || grid.len() != left.len() {
            return Err(TrajectoryError::Ragged);
        }
        if grid.is_empty() {
            return Err(TrajectoryError::BadGrid(0));
        }
        if let Some(j) = grid.windows(2).position(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
            return Err(TrajectoryError::BadGrid(j + 1));
        }
        marks.sort_unstable();
        marks.dedup();
        if let Some(&j) = marks.iter().find(|&&j| j >= grid.len()) {
            return Err(TrajectoryError::BadGrid(j));
        }
        for j in 0..grid.len() {
            if left[j].to_bits() != right[j].to_bits() && marks.binary_search(&j).is_err() {
                return Err(TrajectoryError::UnmarkedJump(j));
            }
        }
        Ok(Self { origin, grid, right, left, marks })
    }

    /// A trajectory without jumps.
    pub fn continuous(origin: f64, grid: Vec<f64>, values: Vec<f64>) -> Result<Self, TrajectoryError> {
        Self::new(origin, grid, values.clone(), values, Vec::new())
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values_right(&self) -> &[f64] {
        &self.right
    }

    pub fn values_left(&self) -> &[f64] {
        &self.left
    }

    /// Indices of jump times, ascending.
    pub fn marks(&self) -> &[usize] {
        &self.marks
    }

    pub fn is_marked(&self, j: usize) -> bool {
        self.marks.binary_search(&j).is_ok()
    }

    pub fn start(&self) -> f64 {
        self.grid[0]
    }

    pub fn end(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index of the grid time equal to `t` up to [`SNAP_REL`], if any.
    pub fn index_near(&self, t: f64) -> Option<usize> {
        let tol = snap_tol(t);
        let j = self.grid.partition_point(|&g| g < t);
        [j.checked_sub(1), Some(j)]
            .into_iter()
            .flatten()
            .filter(|&i| i < self.grid.len())
            .find(|&i| (self.grid[i] - t).abs() <= tol)
    }

    /// Value at `t`. Exact at grid times, linear in between; `side` picks the
    /// left limit or the stored value at a jump.
    pub fn evaluate(&self, t: f64, side: Side) -> Result<f64, TrajectoryError> {
        if let Some(j) = self.index_near(t) {
            return Ok(match side {
                Side::Left => self.left[j],
                Side::Right => self.right[j],
            });
        }
        if !(t > self.start() && t < self.end()) {
            return Err(TrajectoryError::OutOfRange { t, start: self.start(), end: self.end() });
        }
        let j = self.grid.partition_point(|&g| g <= t) - 1;
        let (t0, t1) = (self.grid[j], self.grid[j + 1]);
        let w = (t - t0) / (t1 - t0);
        Ok(self.right[j] + (self.left[j + 1] - self.right[j]) * w)
    }

    /// Largest absolute value over grid times in `[from, to]`, both sides.
    pub fn sup_abs(&self, from: f64, to: f64) -> f64 {
        let lo = self.grid.partition_point(|&g| g < from);
        let hi = self.grid.partition_point(|&g| g <= to);
        (lo..hi).fold(0.0_f64, |acc, j| acc.max(self.right[j].abs()).max(self.left[j].abs()))
    }

    /// Multiplies every value by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            origin: self.origin,
            grid: self.grid.clone(),
            right: self.right.iter().map(|v| v * c).collect(),
            left: self.left.iter().map(|v| v * c).collect(),
            marks: self.marks.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_interpolation() {
        let traj = Trajectory::continuous(0.0, vec![0.0, 1.0], vec![1.0, 3.0]).unwrap();
        assert_eq!(traj.evaluate(0.5, Side::Right).unwrap(), 2.0);
        assert_eq!(traj.evaluate(0.5, Side::Left).unwrap(), 2.0);
    }

    #[test]
    fn two_sided_values_at_a_jump() {
        let traj = Trajectory::new(0.0, vec![0.0, 1.0, 2.0], vec![2.0, 1.0, 1.0], vec![2.0, 2.0, 1.0], vec![1])
            .unwrap();
        assert_eq!(traj.evaluate(1.0, Side::Left).unwrap(), 2.0);
        assert_eq!(traj.evaluate(1.0, Side::Right).unwrap(), 1.0);
        assert_eq!(traj.evaluate(0.5, Side::Right).unwrap(), 2.0);
        assert_eq!(traj.evaluate(1.5, Side::Left).unwrap(), 1.0);
        // queries a hair away from a jump time still see the jump
        assert_eq!(traj.evaluate(1.0 + 1e-15, Side::Left).unwrap(), 2.0);
    }

    #[test]
    fn constant_trajectory() {
        let c = -0.75;
        let grid: Vec<f64> = (0..11).map(|j| j as f64 * 0.1).collect();
        let traj = Trajectory::continuous(0.0, grid.clone(), vec![c; grid.len()]).unwrap();
        for t in [0.0, 0.05, 0.33, 0.999, 1.0] {
            assert_eq!(traj.evaluate(t, Side::Right).unwrap(), c);
        }
    }

    #[test]
    fn exact_at_grid_points() {
        let grid = vec![0.0, 0.1, 0.3, 0.7];
        let vals = vec![0.1 + 0.2, std::f64::consts::PI, -1e-300, 7.0];
        let traj = Trajectory::continuous(0.0, grid.clone(), vals.clone()).unwrap();
        for (t, v) in grid.iter().zip(&vals) {
            assert_eq!(traj.evaluate(*t, Side::Right).unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn out_of_range_and_validation() {
        let traj = Trajectory::continuous(0.0, vec![0.0, 1.0], vec![1.0, 3.0]).unwrap();
        assert!(matches!(traj.evaluate(1.5, Side::Right), Err(TrajectoryError::OutOfRange { .. })));
        assert!(matches!(traj.evaluate(-0.1, Side::Right), Err(TrajectoryError::OutOfRange { .. })));
        assert_eq!(
            Trajectory::new(0.0, vec![0.0, 1.0], vec![1.0, 2.0], vec![1.0, 3.0], vec![]),
            Err(TrajectoryError::UnmarkedJump(1))
        );
        assert_eq!(Trajectory::continuous(0.0, vec![0.0, 0.0], vec![1.0, 1.0]), Err(TrajectoryError::BadGrid(1)));
    }
}
