//! The time warp between the impulsive equation and its companions.
//!
//! For every residue class `i ∈ {0, …, ℓ}` the intervals
//! `[θ_{m(ℓ+1)+i}, θ_{m(ℓ+1)+i+1})` are laid end to end on a compressed
//! timeline with junctions ϑ^i_m. The warp `α_i` maps compressed time to real
//! time, `β_i` is its inverse on the residue-i blocks, and
//! `σ_i = β_i ∘ τ ∘ α_i` is the deviating argument seen from the compressed
//! timeline. Rescaling `x ∘ α_i` by the accumulated impulse factors gives a
//! function `y_i` without jumps that solves an ordinary delay equation (the
//! *companion* of residue `i`), see [`CompanionSystem`], [`project`] and
//! [`reconstruct`].

mod assumptions;
mod companion;
mod grid;
mod transform;

pub use assumptions::{check_assumptions, AssumptionReport, BoundFamily, Check, ResidualRow};
pub use companion::{CompanionEquation, CompanionHistory, CompanionSystem};
pub use grid::ResidueGrid;
pub use transform::{
    build_impulsive_from_companions, junction_mismatches, project, reconstruct, AssembledEquation,
    AssembledInitial,
};

use thiserror::Error;

use crate::problem::{FnError, ScalarFn};
use crate::schedule::{ImpulseSchedule, ScheduleError};
use crate::trajectory::{Side, TrajectoryError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WarpError {
    #[error("schedule too short: impulse index {needed} is required")]
    ScheduleTooShort { needed: i64 },
    #[error("residue {residue} out of range (ℓ = {ell})")]
    BadResidue { residue: usize, ell: usize },
    #[error("t = {t} is below the residue-{residue} domain starting at {start}")]
    BelowDomain { residue: usize, t: f64, start: f64 },
    #[error("t = {t} is beyond the residue-{residue} domain ending at {end}")]
    BeyondDomain { residue: usize, t: f64, end: f64 },
    #[error("t = {t} is not in a residue-{residue} block (gap [{gap_start}, {gap_end}))")]
    NotInResidue { residue: usize, t: f64, gap_start: f64, gap_end: f64 },
    #[error("residue preservation fails at t = {t} for residue {residue}: τ(α(t)) = {image} is not in a residue-{residue} block")]
    ResidueViolation { residue: usize, t: f64, image: f64 },
    #[error("t = {t} is in no block of the schedule")]
    Uncovered { t: f64 },
    #[error("trajectory does not reach the residue-{residue} blocks")]
    Coverage { residue: usize },
    #[error("expected {expected} companion trajectories, got {got}")]
    CompanionCount { expected: usize, got: usize },
    #[error(transparent)]
    Function(#[from] FnError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

impl From<ScheduleError> for WarpError {
    fn from(err: ScheduleError) -> Self {
        match err {
            ScheduleError::TooShort { needed } => WarpError::ScheduleTooShort { needed },
            other => WarpError::ScheduleTooShort { needed: schedule_index(&other) },
        }
    }
}

fn schedule_index(err: &ScheduleError) -> i64 {
    match err {
        ScheduleError::NotIncreasing { k }
        | ScheduleError::NonFinite { k }
        | ScheduleError::ZeroFactor { k }
        | ScheduleError::MissingFactor { k }
        | ScheduleError::TooShort { needed: k } => *k,
        _ => 0,
    }
}

/// Junction grids of all residue classes of a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpGrid {
    ell: usize,
    theta0: f64,
    residues: Vec<ResidueGrid>,
}

/// Builds ϑ^i for every residue: `ϑ_0 = θ_0`,
/// `ϑ_{m+1} = ϑ_m + (θ_{m(ℓ+1)+i+1} − θ_{m(ℓ+1)+i})` going forward and the
/// same block lengths subtracted going back to `m = −n`.
pub fn build_warp_grid(sched: &ImpulseSchedule) -> Result<WarpGrid, WarpError> {
    let residues = (0..sched.period())
        .map(|i| ResidueGrid::build(sched, i))
        .collect::<Result<_, _>>()?;
    Ok(WarpGrid { ell: sched.ell(), theta0: sched.theta0(), residues })
}

impl WarpGrid {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn residue_count(&self) -> usize {
        self.residues.len()
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn residue(&self, i: usize) -> Result<&ResidueGrid, WarpError> {
        self.residues.get(i).ok_or(WarpError::BadResidue { residue: i, ell: self.ell })
    }

    pub fn residues(&self) -> &[ResidueGrid] {
        &self.residues
    }

    /// ϑ^i_k.
    pub fn vartheta(&self, i: usize, k: i64) -> Result<f64, WarpError> {
        let r = self.residue(i)?;
        r.vartheta_at(k).ok_or(WarpError::ScheduleTooShort {
            needed: k * (self.ell as i64 + 1) + i as i64,
        })
    }

    pub fn alpha(&self, i: usize, t: f64) -> Result<f64, WarpError> {
        self.residue(i)?.alpha(t, Side::Right)
    }

    pub fn alpha_side(&self, i: usize, t: f64, side: Side) -> Result<f64, WarpError> {
        self.residue(i)?.alpha(t, side)
    }

    pub fn beta(&self, i: usize, t: f64) -> Result<f64, WarpError> {
        self.residue(i)?.beta(t, Side::Right)
    }

    pub fn beta_side(&self, i: usize, t: f64, side: Side) -> Result<f64, WarpError> {
        self.residue(i)?.beta(t, side)
    }

    /// χ_i(t): whether t lies in a block of residue i.
    pub fn chi(&self, i: usize, t: f64) -> bool {
        self.residue(i).is_ok_and(|r| r.real_block(t, Side::Right).is_ok())
    }

    /// The residue whose block contains t.
    pub fn residue_of(&self, t: f64, side: Side) -> Option<usize> {
        self.residues.iter().position(|r| match side {
            Side::Right => r.real_block(t, Side::Right).is_ok(),
            Side::Left => r.real_block(t, Side::Left).is_ok_and(|m| {
                // real_block falls back to the right-sided block at a start
                r.block(m).is_some_and(|(s, _)| t > s)
            }),
        })
    }

    /// σ_i(t) = β_i(τ(α_i(t))); `Left` gives the left limit.
    pub fn sigma(&self, i: usize, tau: &ScalarFn, t: f64, side: Side) -> Result<f64, WarpError> {
        let r = self.residue(i)?;
        let a = r.alpha(t, side)?;
        let image = tau.eval(a)?;
        r.beta(image, side).map_err(|err| match err {
            WarpError::NotInResidue { .. } | WarpError::BelowDomain { .. } => {
                WarpError::ResidueViolation { residue: i, t, image }
            }
            other => other,
        })
    }

    /// Product of λ_{j(ℓ+1)+i} over j ∈ ℕ_0 with ϑ^i_j ∈ (s, t], or of their
    /// reciprocals when `inverted`. `s = −∞` takes every j with ϑ^i_j ≤ t.
    pub fn impulse_product(&self, i: usize, s: f64, t: f64, inverted: bool) -> Result<f64, WarpError> {
        self.impulse_product_side(i, s, t, inverted, Side::Right)
    }

    /// As [`WarpGrid::impulse_product`]; `Left` uses the window [s, t).
    pub fn impulse_product_side(
        &self,
        i: usize,
        s: f64,
        t: f64,
        inverted: bool,
        side: Side,
    ) -> Result<f64, WarpError> {
        let r = self.residue(i)?;
        let lo = if s == f64::NEG_INFINITY { 0 } else { r.junctions_up_to(s, side) };
        let hi = r.junctions_up_to(t, side);
        r.factor_product(lo, hi, inverted)
    }

    /// Product of λ_{j(ℓ+1)+i} over j ∈ ℕ_0 with θ_{j(ℓ+1)+i} ∈ (s, t].
    pub fn theta_product(&self, i: usize, s: f64, t: f64, inverted: bool) -> Result<f64, WarpError> {
        let r = self.residue(i)?;
        let lo = if s == f64::NEG_INFINITY { 0 } else { r.impulses_up_to(s, Side::Right) };
        let hi = r.impulses_up_to(t, Side::Right);
        r.factor_product(lo, hi, inverted)
    }

    /// Position on the residue-i timeline that corresponds to real time t:
    /// β_i(t) inside a residue-i block, the next junction inside a gap.
    pub fn warped_position(&self, i: usize, t: f64) -> Result<f64, WarpError> {
        let r = self.residue(i)?;
        match r.beta(t, Side::Right) {
            Ok(v) => Ok(v),
            Err(WarpError::NotInResidue { gap_start, .. }) => r.beta(gap_start, Side::Left),
            Err(WarpError::BeyondDomain { .. }) => Ok(r.domain_end()),
            Err(err) => Err(err),
        }
    }
}
