//! Numerical stability surrogates based on linearity.
//!
//! For a linear homogeneous problem `x(·; θ, c·φ) = c·x(·; θ, φ)`, so the
//! largest admissible initial size for a bound ε is `δ̂ = ε / sup|x(·; θ, φ)|`
//! with `‖φ‖ = 1`. One solve per start time and family member suffices.

use rayon::prelude::*;
use serde::Serialize;

use crate::problem::{compute_rho, DelaySpec};
use crate::schedule::ImpulseSchedule;
use crate::solver::{solve_companion_with, solve_impulsive_from, SolveConfig, SolveError};
use crate::trajectory::{Side, Trajectory};
use crate::warp::CompanionSystem;

/// Unit-norm initial functions on `[a, θ]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Member {
    Constant,
    Ramp,
    Sine,
}

impl Member {
    pub const ALL: [Member; 3] = [Member::Constant, Member::Ramp, Member::Sine];

    pub fn value(self, a: f64, theta: f64, t: f64) -> f64 {
        let len = theta - a;
        if len <= 0.0 {
            return 1.0;
        }
        let u = ((t - a) / len).clamp(0.0, 1.0);
        match self {
            Member::Constant => 1.0,
            Member::Ramp => u,
            Member::Sine => (2.0 * std::f64::consts::PI * u).sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityOptions {
    /// Start times in the real time scale.
    pub start_times: Vec<f64>,
    pub eps_list: Vec<f64>,
    /// Asymptotic surrogate: `|x(T)| ≤ tail_tol` for unit initial data.
    pub tail_tol: f64,
    /// Stable surrogate: `sup_{late}|x| ≤ (1 + growth_tol)·sup_{early}|x|`.
    pub growth_tol: f64,
    /// Sample count used to locate the earliest delayed argument.
    pub samples: usize,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self { start_times: Vec::new(), eps_list: vec![1e-2, 1e-1, 1.0], tail_tol: 1e-3, growth_tol: 1e-6, samples: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityRow {
    pub theta: f64,
    pub eps: f64,
    pub delta: f64,
    /// max over the family of sup_{[θ, T]} |x|.
    pub amplification: f64,
    /// max over the family of |x(T)|.
    pub tail_abs: f64,
    /// max over the family of sup over the later half of `[θ, T]` divided by
    /// sup over the earlier half.
    pub growth_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub target: String,
    pub horizon: f64,
    pub rows: Vec<StabilityRow>,
    pub stable: bool,
    pub uniform: bool,
    pub asymptotic: bool,
}

/// What to probe.
#[derive(Clone, Copy)]
pub enum ProbeSystem<'a> {
    Impulsive { spec: &'a DelaySpec, sched: &'a ImpulseSchedule },
    Companion { system: &'a CompanionSystem, residue: usize },
}

impl ProbeSystem<'_> {
    fn label(&self) -> String {
        match self {
            ProbeSystem::Impulsive { .. } => "impulsive".into(),
            ProbeSystem::Companion { residue, .. } => format!("companion:{residue}"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Run {
    sup: f64,
    tail: f64,
    growth: f64,
}

fn summarize(x: &Trajectory, start: f64, end: f64) -> Run {
    let mid = start + 0.5 * (end - start);
    let sup = x.sup_abs(start, end);
    let early = x.sup_abs(start, mid);
    let late = x.sup_abs(mid, end);
    let growth = if early > 0.0 {
        late / early
    } else if late > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let tail = x.evaluate(end, Side::Right).map_or(f64::NAN, f64::abs);
    Run { sup, tail, growth }
}

fn sampled_min(
    f: impl Fn(f64) -> Result<f64, SolveError>,
    from: f64,
    to: f64,
    samples: usize,
) -> Result<f64, SolveError> {
    let n = samples.max(2);
    let mut lo = from;
    for j in 0..n {
        let t = from + (to - from) * j as f64 / (n - 1) as f64;
        lo = lo.min(f(t)?);
    }
    Ok(lo)
}

fn run_one(system: ProbeSystem<'_>, theta: f64, member: Member, cfg: &SolveConfig, samples: usize) -> Result<Run, SolveError> {
    match system {
        ProbeSystem::Impulsive { spec, sched } => {
            let mut a = compute_rho(&spec.tau, theta, cfg.horizon, samples)?.min(theta);
            if let Some(k) = sched.interval_index(theta) {
                let source = k.max(0) - sched.ell() as i64;
                if let Some(th) = sched.theta(source) {
                    a = a.min(th);
                }
            }
            let hist = move |t: f64, _side: Side| -> Result<f64, SolveError> { Ok(member.value(a, theta, t)) };
            let x = solve_impulsive_from(spec, &hist, a, sched, theta, cfg)?;
            Ok(summarize(&x, theta, cfg.horizon))
        }
        ProbeSystem::Companion { system, residue } => {
            let s = system.horizon(residue, theta)?;
            let end = system.horizon(residue, cfg.horizon)?;
            let floor = system.history_start(residue)?;
            let a = sampled_min(|t| Ok(system.sigma(residue, t, Side::Right)?), s, end, samples)?.max(floor);
            let hist = move |t: f64, _side: Side| -> Result<f64, SolveError> { Ok(member.value(a, s, t)) };
            let y = solve_companion_with(system, residue, &hist, a, s, end, cfg)?;
            Ok(summarize(&y, s, end))
        }
    }
}

/// Probes the zero solution of `system` from every start time in `opts`
/// against the unit-norm family {1, ramp, sine}.
pub fn probe_stability(
    system: ProbeSystem<'_>,
    opts: &StabilityOptions,
    cfg: &SolveConfig,
) -> Result<StabilityReport, SolveError> {
    let jobs: Vec<(usize, Member)> =
        (0..opts.start_times.len()).flat_map(|j| Member::ALL.into_iter().map(move |m| (j, m))).collect();
    let runs: Vec<Run> = jobs
        .par_iter()
        .map(|&(j, m)| run_one(system, opts.start_times[j], m, cfg, opts.samples))
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::with_capacity(opts.start_times.len() * opts.eps_list.len());
    let mut ratios = Vec::with_capacity(opts.start_times.len());
    let mut stable = true;
    let mut asymptotic = true;
    for (j, &theta) in opts.start_times.iter().enumerate() {
        let chunk = &runs[j * Member::ALL.len()..(j + 1) * Member::ALL.len()];
        let amplification = chunk.iter().fold(0.0_f64, |m, r| m.max(r.sup));
        let tail_abs = chunk.iter().fold(0.0_f64, |m, r| m.max(r.tail));
        let growth_ratio = chunk.iter().fold(0.0_f64, |m, r| m.max(r.growth));
        stable &= growth_ratio <= 1.0 + opts.growth_tol;
        asymptotic &= tail_abs <= opts.tail_tol;
        ratios.push(1.0 / amplification);
        for &eps in &opts.eps_list {
            rows.push(StabilityRow {
                theta,
                eps,
                delta: eps / amplification,
                amplification,
                tail_abs,
                growth_ratio,
            });
        }
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0_f64, f64::max);
    let uniform = stable && !ratios.is_empty() && lo > 0.0 && hi / lo < 10.0;
    let asymptotic = stable && asymptotic && !ratios.is_empty();
    Ok(StabilityReport { target: system.label(), horizon: cfg.horizon, rows, stable, uniform, asymptotic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{InitialData, ScalarFn};
    use crate::schedule::Factors;

    fn setup(p: &str, lambda: Vec<f64>, horizon: f64) -> (DelaySpec, ImpulseSchedule) {
        let sched = ImpulseSchedule::uniform(0.0, 1.0, horizon, &Factors::Cyclic(lambda), 0, 1).unwrap();
        (DelaySpec::parse(p, "t - 1").unwrap(), sched)
    }

    fn opts(starts: Vec<f64>) -> StabilityOptions {
        StabilityOptions { start_times: starts, eps_list: vec![0.1, 1.0], ..StabilityOptions::default() }
    }

    #[test]
    fn frozen_dynamics_give_delta_equal_to_eps() {
        let (spec, sched) = setup("0", vec![1.0], 10.0);
        let cfg = SolveConfig { step: 0.01, horizon: 10.0, ..SolveConfig::default() };
        let rep = probe_stability(ProbeSystem::Impulsive { spec: &spec, sched: &sched }, &opts(vec![0.0, 2.5]), &cfg).unwrap();
        for row in &rep.rows {
            assert_eq!(row.delta, row.eps);
        }
        assert!(rep.stable && rep.uniform && !rep.asymptotic);
    }

    #[test]
    fn decaying_and_growing_regimes() {
        let cfg = SolveConfig { step: 0.01, horizon: 40.0, ..SolveConfig::default() };
        let (spec, sched) = setup("1", vec![1.0], 40.0);
        let rep = probe_stability(ProbeSystem::Impulsive { spec: &spec, sched: &sched }, &opts(vec![0.0, 5.0]), &cfg).unwrap();
        assert!(rep.stable && rep.asymptotic, "{rep:?}");
        let (spec, sched) = setup("2", vec![1.0], 40.0);
        let rep = probe_stability(ProbeSystem::Impulsive { spec: &spec, sched: &sched }, &opts(vec![0.0]), &cfg).unwrap();
        assert!(!rep.stable && !rep.asymptotic);
    }

    #[test]
    fn delta_scales_linearly_with_eps() {
        let (spec, sched) = setup("0.7", vec![1.0], 15.0);
        let cfg = SolveConfig { step: 0.01, horizon: 15.0, ..SolveConfig::default() };
        let rep = probe_stability(ProbeSystem::Impulsive { spec: &spec, sched: &sched }, &opts(vec![0.0]), &cfg).unwrap();
        assert_eq!(rep.rows[1].delta, 10.0 * rep.rows[0].delta);
    }

    #[test]
    fn companion_probe_matches_plain_equation() {
        let sched = ImpulseSchedule::uniform(0.0, 1.0, 60.0, &Factors::Cyclic(vec![2.0, 2.0]), 1, 1).unwrap();
        let spec = DelaySpec::parse("2", "t - 2").unwrap();
        let init = InitialData { phi: ScalarFn::constant(1.0), rho0: -2.0 };
        let sys = CompanionSystem::new(&sched, &spec, &init).unwrap();
        let cfg = SolveConfig { step: 0.01, horizon: 60.0, ..SolveConfig::default() };
        // companions are y' + y(t − 1) = 0
        let rep = probe_stability(ProbeSystem::Companion { system: &sys, residue: 0 }, &opts(vec![0.0]), &cfg).unwrap();
        assert!(rep.stable && rep.asymptotic, "{rep:?}");
        assert_eq!(rep.target, "companion:0");
    }
}
