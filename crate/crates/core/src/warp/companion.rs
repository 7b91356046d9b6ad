//! The ℓ+1 nonimpulsive companion equations.

use crate::problem::{DelaySpec, InitialData};
use crate::schedule::ImpulseSchedule;
use crate::solver::{DelayEquation, History, SolveError};
use crate::trajectory::{snap_tol, Side};

use super::{build_warp_grid, WarpError, WarpGrid};

/// Companion equations `y_i'(t) + q_i(t)·y_i(σ_i(t)) = 0` of an impulsive
/// problem, one per residue class, with
///
/// * `σ_i = β_i ∘ τ ∘ α_i`,
/// * `q_i(t) = Π{1/λ_{j(ℓ+1)+i} : σ_i(t) < ϑ^i_j ≤ t, j ≥ 0} · p(α_i(t))`,
/// * initial function `φ ∘ α_i` on `[ϑ^i_{−n}, θ_0]`.
#[derive(Debug, Clone)]
pub struct CompanionSystem {
    sched: ImpulseSchedule,
    grid: WarpGrid,
    spec: DelaySpec,
    init: InitialData,
}

impl CompanionSystem {
    pub fn new(sched: &ImpulseSchedule, spec: &DelaySpec, init: &InitialData) -> Result<Self, WarpError> {
        let grid = build_warp_grid(sched)?;
        Ok(Self::from_parts(sched, &grid, spec, init))
    }

    pub fn from_parts(sched: &ImpulseSchedule, grid: &WarpGrid, spec: &DelaySpec, init: &InitialData) -> Self {
        Self { sched: sched.clone(), grid: grid.clone(), spec: spec.clone(), init: init.clone() }
    }

    pub fn residue_count(&self) -> usize {
        self.grid.residue_count()
    }

    pub fn grid(&self) -> &WarpGrid {
        &self.grid
    }

    pub fn schedule(&self) -> &ImpulseSchedule {
        &self.sched
    }

    pub fn spec(&self) -> &DelaySpec {
        &self.spec
    }

    pub fn initial(&self) -> &InitialData {
        &self.init
    }

    pub fn sigma(&self, i: usize, t: f64, side: Side) -> Result<f64, WarpError> {
        self.grid.sigma(i, &self.spec.tau, t, side)
    }

    /// q_i(t); `Left` gives the left limit, built from the window [σ_i, t).
    pub fn q(&self, i: usize, t: f64, side: Side) -> Result<f64, WarpError> {
        let sigma = self.sigma(i, t, side)?;
        let product = self.grid.impulse_product_side(i, sigma, t, true, side)?;
        let p = self.spec.p.eval(self.grid.alpha_side(i, t, side)?)?;
        Ok(product * p)
    }

    /// φ(α_i(t)) for t before θ_0. At θ_0 itself the value is the left limit
    /// `φ(θ_{i−ℓ}⁻)`, which is where y_i starts.
    pub fn phi_warped(&self, i: usize, t: f64, side: Side) -> Result<f64, WarpError> {
        let theta0 = self.grid.theta0();
        let (at, side) = if t >= theta0 - snap_tol(theta0) { (theta0, Side::Left) } else { (t, side) };
        let a = self.grid.alpha_side(i, at, side)?;
        Ok(self.init.phi.eval(a)?)
    }

    /// ϑ^i_{−n}, the left end of the warped initial interval.
    pub fn history_start(&self, i: usize) -> Result<f64, WarpError> {
        Ok(self.grid.residue(i)?.domain_start())
    }

    /// Companion time that corresponds to the real horizon `t`.
    pub fn horizon(&self, i: usize, t: f64) -> Result<f64, WarpError> {
        self.grid.warped_position(i, t)
    }

    /// Junctions ϑ^i_m in `[from, to]`; coefficient and argument of the
    /// companion may jump there, and φ∘α_i jumps at the history junctions.
    pub fn junctions(&self, i: usize, from: f64, to: f64) -> Result<Vec<f64>, WarpError> {
        let r = self.grid.residue(i)?;
        Ok(r.vartheta().iter().copied().filter(|&v| v >= from && v <= to).collect())
    }

    pub fn equation(&self, i: usize) -> CompanionEquation<'_> {
        CompanionEquation { system: self, residue: i }
    }

    pub fn history(&self, i: usize) -> CompanionHistory<'_> {
        CompanionHistory { system: self, residue: i }
    }
}

/// Companion `i` viewed as a plain delay equation.
#[derive(Debug, Clone, Copy)]
pub struct CompanionEquation<'a> {
    system: &'a CompanionSystem,
    residue: usize,
}

impl DelayEquation for CompanionEquation<'_> {
    fn coefficient(&self, t: f64, side: Side) -> Result<f64, SolveError> {
        Ok(self.system.q(self.residue, t, side)?)
    }

    fn argument(&self, t: f64, side: Side) -> Result<f64, SolveError> {
        Ok(self.system.sigma(self.residue, t, side)?)
    }
}

/// The warped initial function φ∘α_i.
#[derive(Debug, Clone, Copy)]
pub struct CompanionHistory<'a> {
    system: &'a CompanionSystem,
    residue: usize,
}

impl History for CompanionHistory<'_> {
    fn value(&self, t: f64, side: Side) -> Result<f64, SolveError> {
        Ok(self.system.phi_warped(self.residue, t, side)?)
    }
}
