//! Method-of-steps integration with an explicit Heun scheme.
//!
//! The grid is a uniform step from the start time merged with the
//! breakpoints (impulse times, junctions) and the end time. One step from
//! `t_j` to `t_{j+1}` is
//!
//! ```text
//! k1 = −c(t_j)·u(d(t_j))
//! k2 = −c(t_{j+1}⁻)·u(d(t_{j+1}⁻)⁻)       with u(t_{j+1}⁻) ≈ u_j + h·k1
//! u_{j+1}⁻ = u_j + h/2·(k1 + k2)
//! ```
//!
//! Delayed values come from the history function before the start time and
//! from the already computed trajectory after it. When `d(t_{j+1})` falls
//! inside the current step, the corrector is repeated `picard_iters` times
//! with the current step interpolated linearly. At an impulse time θ_k the
//! stored value is then replaced by `λ_k · u(θ_{k−ℓ}⁻)`.

use thiserror::Error;

use crate::problem::{DelaySpec, FnError, InitialData, PlainEquation, ScalarFn};
use crate::schedule::ImpulseSchedule;
use crate::trajectory::{snap_tol, Side, Trajectory, TrajectoryError};
use crate::warp::{CompanionSystem, WarpError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid solver settings: {0}")]
    Config(String),
    #[error("deviating argument is ahead of time at t = {t}: d(t) = {arg}")]
    Advanced { t: f64, arg: f64 },
    #[error("at t = {t} the solution is needed at {arg}, before the history start {start}")]
    HistoryTooShort { t: f64, arg: f64, start: f64 },
    #[error("impulse schedule ends at {last}, before the horizon {horizon}")]
    ScheduleExhausted { last: f64, horizon: f64 },
    #[error("solution is not finite at t = {t}")]
    Diverged { t: f64 },
    #[error(transparent)]
    Function(#[from] FnError),
    #[error(transparent)]
    Warp(#[from] WarpError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

/// A delay equation `u'(t) + c(t)·u(d(t)) = 0` as seen by the integrator.
///
/// `Side::Left` asks for left limits. The integrator uses them at the end
/// of each step, so coefficients and arguments may jump at breakpoints.
pub trait DelayEquation: Sync {
    fn coefficient(&self, t: f64, side: Side) -> Result<f64, SolveError>;
    fn argument(&self, t: f64, side: Side) -> Result<f64, SolveError>;
}

/// Values of the solution up to the start time.
pub trait History: Sync {
    fn value(&self, t: f64, side: Side) -> Result<f64, SolveError>;
}

impl<F> History for F
where
    F: Fn(f64, Side) -> Result<f64, SolveError> + Sync,
{
    fn value(&self, t: f64, side: Side) -> Result<f64, SolveError> {
        self(t, side)
    }
}

impl DelayEquation for DelaySpec {
    fn coefficient(&self, t: f64, _side: Side) -> Result<f64, SolveError> {
        Ok(self.p.eval(t)?)
    }

    fn argument(&self, t: f64, _side: Side) -> Result<f64, SolveError> {
        Ok(self.tau.eval(t)?)
    }
}

impl DelayEquation for PlainEquation {
    fn coefficient(&self, t: f64, _side: Side) -> Result<f64, SolveError> {
        Ok(self.q.eval(t)?)
    }

    fn argument(&self, t: f64, _side: Side) -> Result<f64, SolveError> {
        Ok(self.sigma.eval(t)?)
    }
}

impl History for InitialData {
    fn value(&self, t: f64, _side: Side) -> Result<f64, SolveError> {
        Ok(self.phi.eval(t)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    /// Uniform step h.
    pub step: f64,
    /// End time T.
    pub horizon: f64,
    /// Allowed residual of the impulse rule.
    pub tol_impulse: f64,
    /// Corrector sweeps when the delayed argument falls inside the step.
    pub picard_iters: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { step: 1e-3, horizon: 10.0, tol_impulse: 1e-9, picard_iters: 2 }
    }
}

impl SolveConfig {
    fn validate(&self, start: f64) -> Result<(), SolveError> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(SolveError::Config(format!("step must be positive, got {}", self.step)));
        }
        if !(self.horizon > start && self.horizon.is_finite()) {
            return Err(SolveError::Config(format!(
                "horizon {} must exceed the start time {start}",
                self.horizon
            )));
        }
        if self.picard_iters == 0 {
            return Err(SolveError::Config("picard_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// A plain (nonimpulsive) initial value problem.
pub struct PlainProblem<'a> {
    pub equation: &'a dyn DelayEquation,
    pub history: &'a dyn History,
    /// Left end of the initial interval.
    pub history_start: f64,
    pub start: f64,
    /// Times the grid must contain after `start` (discontinuities of the
    /// coefficient or the argument).
    pub breakpoints: Vec<f64>,
    /// Times the history samples must contain (jumps of the initial
    /// function).
    pub history_breaks: Vec<f64>,
}

/// Merges a uniform grid with the breakpoints; uniform points closer than
/// `1e-6·h` to a breakpoint are dropped.
pub fn build_grid(start: f64, end: f64, step: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut bps: Vec<f64> = breakpoints.iter().copied().filter(|&b| b > start && b < end).collect();
    bps.push(end);
    bps.sort_by(f64::total_cmp);
    bps.dedup_by(|b, a| (*b - *a).abs() <= snap_tol(*a));
    let guard = 1e-6 * step;
    let mut grid = Vec::with_capacity(((end - start) / step) as usize + bps.len() + 2);
    grid.push(start);
    let mut next_bp = 0;
    let mut j: u64 = 1;
    loop {
        let u = start + j as f64 * step;
        while next_bp < bps.len() && bps[next_bp] < u - guard {
            push_strict(&mut grid, bps[next_bp]);
            next_bp += 1;
        }
        if u >= end - guard {
            break;
        }
        if next_bp >= bps.len() || bps[next_bp] - u > guard {
            push_strict(&mut grid, u);
        }
        j += 1;
    }
    while next_bp < bps.len() {
        push_strict(&mut grid, bps[next_bp]);
        next_bp += 1;
    }
    grid
}

fn push_strict(grid: &mut Vec<f64>, t: f64) {
    if grid.last().is_none_or(|&last| t > last + snap_tol(t)) {
        grid.push(t);
    }
}

fn history_grid(from: f64, to: f64, step: f64, breaks: &[f64]) -> Vec<f64> {
    if to <= from {
        return vec![to];
    }
    build_grid(from, to, step, breaks)
}

struct Impulses<'a> {
    sched: &'a ImpulseSchedule,
}

struct Stepper<'a> {
    eq: &'a dyn DelayEquation,
    hist: &'a dyn History,
    history_start: f64,
    start: f64,
    grid: Vec<f64>,
    right: Vec<f64>,
    left: Vec<f64>,
}

impl Stepper<'_> {
    /// u(s) for s up to the last stored time, or inside the step
    /// `[t_j, t_{j+1}]` described by `current`.
    fn lookup(&self, t: f64, s: f64, side: Side, current: Option<(f64, f64, f64)>) -> Result<f64, SolveError> {
        let tol = snap_tol(s);
        if s < self.start - tol {
            if s < self.history_start - snap_tol(self.history_start) {
                return Err(SolveError::HistoryTooShort { t, arg: s, start: self.history_start });
            }
            return self.hist.value(s, side);
        }
        if (s - self.start).abs() <= tol {
            return match side {
                Side::Left => self.hist.value(self.start, Side::Left),
                Side::Right => Ok(self.right[0]),
            };
        }
        let n = self.grid.len();
        let last = self.grid[n - 1];
        if s <= last + tol {
            let j = self.grid.partition_point(|&g| g < s - tol);
            if (self.grid[j] - s).abs() <= tol {
                return Ok(match side {
                    Side::Left => self.left[j],
                    Side::Right => self.right[j],
                });
            }
            let (t0, t1) = (self.grid[j - 1], self.grid[j]);
            let w = (s - t0) / (t1 - t0);
            return Ok(self.right[j - 1] + (self.left[j] - self.right[j - 1]) * w);
        }
        match current {
            Some((t1, u1, h)) if s <= t1 + tol => {
                if (s - t1).abs() <= tol {
                    return Ok(u1);
                }
                let u0 = self.right[n - 1];
                Ok(u0 + (u1 - u0) * (s - last) / h)
            }
            _ => Err(SolveError::Advanced { t, arg: s }),
        }
    }

    fn slope(&self, t: f64, side: Side, current: Option<(f64, f64, f64)>) -> Result<(f64, bool), SolveError> {
        let c = self.eq.coefficient(t, side)?;
        let d = self.eq.argument(t, side)?;
        if d > t + snap_tol(t) {
            return Err(SolveError::Advanced { t, arg: d });
        }
        let last = self.grid[self.grid.len() - 1];
        let in_step = d > last + snap_tol(last);
        if c == 0.0 {
            return Ok((0.0, in_step));
        }
        Ok((-c * self.lookup(t, d, side, current)?, in_step))
    }

    fn run(&mut self, times: &[f64], picard_iters: usize, impulses: Option<&Impulses>) -> Result<Vec<usize>, SolveError> {
        let mut marks = Vec::new();
        let mut next_impulse = impulses.map(|imp| first_impulse_after(imp.sched, self.start));
        for &t1 in &times[1..] {
            let n = self.grid.len();
            let t0 = self.grid[n - 1];
            let u0 = self.right[n - 1];
            let h = t1 - t0;
            let (k1, _) = self.slope(t0, Side::Right, None)?;
            let mut u1 = u0 + h * k1;
            let mut sweeps = 0;
            loop {
                let (k2, in_step) = self.slope(t1, Side::Left, Some((t1, u1, h)))?;
                u1 = u0 + 0.5 * h * (k1 + k2);
                sweeps += 1;
                if !in_step || sweeps >= picard_iters {
                    break;
                }
            }
            if !u1.is_finite() {
                return Err(SolveError::Diverged { t: t1 });
            }
            self.grid.push(t1);
            self.left.push(u1);
            self.right.push(u1);

            if let (Some(imp), Some(k)) = (impulses, next_impulse.as_mut()) {
                let th = imp.sched.theta(*k);
                if let Some(th) = th.filter(|&th| (th - t1).abs() <= snap_tol(t1)) {
                    let idx = self.grid.len() - 1;
                    self.right[idx] = self.impulse_value(imp.sched, *k, th)?;
                    marks.push(idx);
                    *k += 1;
                }
            }
        }
        Ok(marks)
    }

    fn impulse_value(&self, sched: &ImpulseSchedule, k: i64, at: f64) -> Result<f64, SolveError> {
        let lambda = sched.lambda_checked(k).map_err(|_| SolveError::ScheduleExhausted {
            last: sched.theta_last(),
            horizon: at,
        })?;
        let source = sched.theta_checked(k - sched.ell() as i64).map_err(|_| SolveError::ScheduleExhausted {
            last: sched.theta_last(),
            horizon: at,
        })?;
        Ok(lambda * self.lookup(at, source, Side::Left, None)?)
    }
}

fn first_impulse_after(sched: &ImpulseSchedule, t: f64) -> i64 {
    let mut k = 0;
    while sched.theta(k).is_some_and(|th| th <= t + snap_tol(t)) {
        k += 1;
    }
    k
}

fn impulse_at(sched: &ImpulseSchedule, t: f64) -> Option<i64> {
    (0..=sched.last_index()).find(|&k| sched.theta(k).is_some_and(|th| (th - t).abs() <= snap_tol(t)))
}

fn solve_general(
    problem: &PlainProblem<'_>,
    cfg: &SolveConfig,
    sched: Option<&ImpulseSchedule>,
) -> Result<Trajectory, SolveError> {
    cfg.validate(problem.start)?;
    let start = problem.start;
    let end = cfg.horizon;
    let mut breakpoints = problem.breakpoints.clone();
    if let Some(s) = sched {
        if s.theta_last() < end {
            return Err(SolveError::ScheduleExhausted { last: s.theta_last(), horizon: end });
        }
        breakpoints.extend(s.times().iter().copied().filter(|&th| th > start && th <= end));
    }
    let times = build_grid(start, end, cfg.step, &breakpoints);

    // samples of the initial function, then the solution itself
    let mut hist_breaks = problem.history_breaks.clone();
    if let Some(s) = sched {
        hist_breaks.extend(s.times().iter().copied().filter(|&th| th < start));
    }
    let hist_times = history_grid(problem.history_start, start, cfg.step, &hist_breaks);
    let mut grid = Vec::with_capacity(hist_times.len() + times.len());
    let mut right = Vec::with_capacity(grid.capacity());
    let mut left = Vec::with_capacity(grid.capacity());
    for &t in &hist_times[..hist_times.len() - 1] {
        grid.push(t);
        right.push(problem.history.value(t, Side::Right)?);
        left.push(problem.history.value(t, Side::Left)?);
    }
    let offset = grid.len();

    let mut stepper = Stepper {
        eq: problem.equation,
        hist: problem.history,
        history_start: problem.history_start,
        start,
        grid: vec![start],
        right: vec![f64::NAN],
        left: vec![problem.history.value(start, Side::Left)?],
    };
    let mut marks = Vec::new();
    stepper.right[0] = match sched.and_then(|s| impulse_at(s, start).map(|k| (s, k))) {
        Some((s, k)) => {
            marks.push(0);
            stepper.impulse_value(s, k, start)?
        }
        None => stepper.left[0],
    };
    let imp = sched.map(|sched| Impulses { sched });
    marks.extend(stepper.run(&times, cfg.picard_iters, imp.as_ref())?);

    let mut all_marks: Vec<usize> = (0..offset).filter(|&j| left[j].to_bits() != right[j].to_bits()).collect();
    if stepper.left[0].to_bits() != stepper.right[0].to_bits() && !marks.contains(&0) {
        marks.push(0);
    }
    all_marks.extend(marks.iter().map(|&m| m + offset));
    grid.extend(stepper.grid);
    right.extend(stepper.right);
    left.extend(stepper.left);
    Ok(Trajectory::new(start, grid, right, left, all_marks)?)
}

/// Solves a plain delay equation from `problem.start` to `cfg.horizon`.
pub fn solve_delay(problem: &PlainProblem<'_>, cfg: &SolveConfig) -> Result<Trajectory, SolveError> {
    solve_general(problem, cfg, None)
}

/// Solves `x'(t) + p(t)·x(τ(t)) = 0`, `x(θ_k) = λ_k·x(θ_{k−ℓ}⁻)` with
/// `x = φ` before θ_0.
///
/// The returned trajectory also samples φ from `init.rho0` (or from the
/// first history impulse time, if that is earlier) and marks every impulse
/// time in `[θ_0, T]`.
pub fn solve_impulsive(
    spec: &DelaySpec,
    sched: &ImpulseSchedule,
    init: &InitialData,
    cfg: &SolveConfig,
) -> Result<Trajectory, SolveError> {
    let problem = PlainProblem {
        equation: spec,
        history: init,
        history_start: init.rho0.min(sched.theta_first()),
        start: sched.theta0(),
        breakpoints: Vec::new(),
        history_breaks: Vec::new(),
    };
    solve_general(&problem, cfg, Some(sched))
}

/// As [`solve_impulsive`] for an arbitrary equation, history and start time.
/// Impulses act at every θ_k (k ≥ 0) in `[start, T]`.
pub fn solve_impulsive_from(
    equation: &dyn DelayEquation,
    history: &dyn History,
    history_start: f64,
    sched: &ImpulseSchedule,
    start: f64,
    cfg: &SolveConfig,
) -> Result<Trajectory, SolveError> {
    let problem = PlainProblem {
        equation,
        history,
        history_start,
        start,
        breakpoints: Vec::new(),
        history_breaks: Vec::new(),
    };
    solve_general(&problem, cfg, Some(sched))
}

/// Solves `y'(t) + q(t)·y(σ(t)) = 0` on `[t0, T]` with `y = φ` on `[d0, t0]`.
pub fn solve_plain(
    q: &ScalarFn,
    sig: &ScalarFn,
    phi: &ScalarFn,
    d0: f64,
    t0: f64,
    cfg: &SolveConfig,
) -> Result<Trajectory, SolveError> {
    let equation = PlainEquation { q: q.clone(), sigma: sig.clone() };
    let history = |t: f64, _side: Side| -> Result<f64, SolveError> { Ok(phi.eval(t)?) };
    let problem = PlainProblem {
        equation: &equation,
        history: &history,
        history_start: d0,
        start: t0,
        breakpoints: Vec::new(),
        history_breaks: Vec::new(),
    };
    solve_delay(&problem, cfg)
}

/// Solves companion `i` from θ_0 up to the companion time of the real
/// horizon `cfg.horizon`.
pub fn solve_companion(system: &CompanionSystem, i: usize, cfg: &SolveConfig) -> Result<Trajectory, SolveError> {
    let start = system.grid().theta0();
    let end = system.horizon(i, cfg.horizon)?;
    let history = system.history(i);
    solve_companion_with(system, i, &history, system.history_start(i)?, start, end, cfg)
}

/// Companion `i` from an arbitrary start with an arbitrary history.
pub fn solve_companion_with(
    system: &CompanionSystem,
    i: usize,
    history: &dyn History,
    history_start: f64,
    start: f64,
    end: f64,
    cfg: &SolveConfig,
) -> Result<Trajectory, SolveError> {
    let equation = system.equation(i);
    let junctions = system.junctions(i, f64::NEG_INFINITY, end)?;
    let problem = PlainProblem {
        equation: &equation,
        history,
        history_start,
        start,
        breakpoints: junctions.iter().copied().filter(|&v| v > start).collect(),
        history_breaks: junctions.iter().copied().filter(|&v| v < start).collect(),
    };
    let cfg = SolveConfig { horizon: end, ..cfg.clone() };
    solve_delay(&problem, &cfg)
}
