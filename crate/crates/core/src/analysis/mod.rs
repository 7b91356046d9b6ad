//! Oscillation, stability and the constant-coefficient criteria.
//!
//! All verdicts are finite-horizon surrogates: oscillation means at least
//! `min_changes` sign changes after a burn-in time, stability is read off
//! the growth of unit-size perturbations.

mod criteria;
mod equivalence;
mod oscillation;
mod stability;

use serde::Serialize;
use thiserror::Error;

use crate::problem::{DelaySpec, InitialData};
use crate::schedule::ImpulseSchedule;
use crate::solver::{SolveConfig, SolveError};
use crate::warp::{AssumptionReport, WarpError};

pub use criteria::{criterion_one_over_e, criterion_pi_over_two, evaluate_criteria, CriteriaReport, CriterionRow};
pub use equivalence::{
    verify_equivalence, Deviation, EquivalenceReport, MixedSignRule, NegativeFactorRule, ProjectionRow, Solutions,
    VerdictRow,
};
pub use oscillation::{detect_oscillation, detect_oscillation_on_residue, Oscillation, OscillationOptions, Verdict};
pub use stability::{probe_stability, Member, ProbeSystem, StabilityOptions, StabilityReport, StabilityRow};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("assumptions violated: residue preservation fails at t = {:?}", .0.residue_preservation.witness)]
    Assumptions(Box<AssumptionReport>),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Warp(#[from] WarpError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisOptions {
    pub oscillation: OscillationOptions,
    pub stability: StabilityOptions,
    /// Samples per companion when checking that q_i and σ_i are constant.
    pub criteria_samples: usize,
}

impl AnalysisOptions {
    /// Defaults for a problem: burn-in θ_0 + 5·(largest delay seen on a
    /// sample of the horizon), five sign changes, start times θ_0 and a
    /// quarter into the horizon.
    pub fn for_problem(sched: &ImpulseSchedule, spec: &DelaySpec, horizon: f64) -> Self {
        let t0 = sched.theta0();
        let samples = 2000;
        let mut max_delay = 0.0_f64;
        for j in 0..samples {
            let t = t0 + (horizon - t0) * j as f64 / (samples - 1) as f64;
            if let Ok(a) = spec.tau.eval(t) {
                max_delay = max_delay.max(t - a);
            }
        }
        Self {
            oscillation: OscillationOptions { t_min: t0 + 5.0 * max_delay, min_changes: 5, floor: 0.0 },
            stability: StabilityOptions {
                start_times: vec![t0, t0 + 0.25 * (horizon - t0)],
                ..StabilityOptions::default()
            },
            criteria_samples: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityAgreement {
    pub residue: usize,
    pub stable: bool,
    pub asymptotic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilitySection {
    pub impulsive: StabilityReport,
    pub companions: Vec<StabilityReport>,
    /// Per companion, whether its stable and asymptotic flags match the
    /// impulsive ones.
    pub agreement: Vec<StabilityAgreement>,
}

/// Verdict of one trajectory; the sign-change times are in the
/// equivalence section.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationSummary {
    /// `impulsive`, `impulsive:<i>` (restricted to residue-i blocks) or
    /// `companion:<i>`.
    pub target: String,
    pub verdict: Verdict,
    pub count: usize,
    pub eventual_sign: i8,
}

impl OscillationSummary {
    fn new(target: String, o: &Oscillation) -> Self {
        Self { target, verdict: o.verdict, count: o.count, eventual_sign: o.eventual_sign }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub horizon: f64,
    pub options: AnalysisOptions,
    pub oscillation: Vec<OscillationSummary>,
    pub criteria: CriteriaReport,
    pub equivalence: EquivalenceReport,
    pub stability: StabilitySection,
}

/// Runs the equivalence check, the criteria and the stability probes.
pub fn analyze(
    sched: &ImpulseSchedule,
    spec: &DelaySpec,
    init: &InitialData,
    cfg: &SolveConfig,
    opts: &AnalysisOptions,
) -> Result<(AnalysisReport, Solutions), AnalysisError> {
    let (equivalence, solutions) = verify_equivalence(sched, spec, init, cfg, &opts.oscillation)?;
    let system = &solutions.system;
    let criteria = evaluate_criteria(system, cfg.horizon, opts.criteria_samples)?;

    let impulsive = probe_stability(ProbeSystem::Impulsive { spec, sched }, &opts.stability, cfg)?;
    let companions = (0..system.residue_count())
        .map(|residue| probe_stability(ProbeSystem::Companion { system, residue }, &opts.stability, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let agreement = companions
        .iter()
        .enumerate()
        .map(|(residue, c)| StabilityAgreement {
            residue,
            stable: c.stable == impulsive.stable,
            asymptotic: c.asymptotic == impulsive.asymptotic,
        })
        .collect();

    let mut oscillation = vec![OscillationSummary::new("impulsive".into(), &equivalence.impulsive)];
    for row in &equivalence.verdicts {
        oscillation.push(OscillationSummary::new(format!("impulsive:{}", row.residue), &row.impulsive));
        oscillation.push(OscillationSummary::new(format!("companion:{}", row.residue), &row.companion));
    }
    let report = AnalysisReport {
        horizon: cfg.horizon,
        options: opts.clone(),
        oscillation,
        criteria,
        equivalence,
        stability: StabilitySection { impulsive, companions, agreement },
    };
    Ok((report, solutions))
}
