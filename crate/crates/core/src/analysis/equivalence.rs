//! Cross-checks between an impulsive problem and its companions.

use rayon::prelude::*;
use serde::Serialize;

use crate::problem::{DelaySpec, InitialData};
use crate::schedule::ImpulseSchedule;
use crate::solver::{solve_companion, solve_impulsive, SolveConfig};
use crate::trajectory::{Side, Trajectory};
use crate::warp::{check_assumptions, junction_mismatches, project, reconstruct, CompanionSystem};

use super::oscillation::{detect_oscillation, detect_oscillation_on_residue, Oscillation, OscillationOptions, Verdict};
use super::AnalysisError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    /// Sup-norm of the difference.
    pub abs: f64,
    /// Sup-norm of the reference solution.
    pub reference_sup: f64,
    /// `abs / reference_sup`.
    pub relative: f64,
}

impl Deviation {
    fn new(abs: f64, reference_sup: f64) -> Self {
        let relative = if reference_sup > 0.0 { abs / reference_sup } else { abs };
        Self { abs, reference_sup, relative }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionRow {
    pub residue: usize,
    pub deviation: Deviation,
    /// Largest jump of the projected solution at a junction ϑ_m, m ≥ 0.
    pub junction_mismatch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictRow {
    pub residue: usize,
    /// x restricted to the residue-i blocks.
    pub impulsive: Oscillation,
    pub companion: Oscillation,
    /// Only compared when every factor is positive.
    pub agree: Option<bool>,
}

/// Companions that keep one sign but disagree on it force the impulsive
/// solution to take both signs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedSignRule {
    pub applies: bool,
    pub companion_signs: Vec<i8>,
    pub consistent: Option<bool>,
}

/// A negative factor makes the impulsive problem oscillatory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeFactorRule {
    pub applies: bool,
    pub consistent: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub projection: Vec<ProjectionRow>,
    pub reconstruction: Deviation,
    pub impulsive: Oscillation,
    pub verdicts: Vec<VerdictRow>,
    pub all_factors_positive: bool,
    pub mixed_signs: MixedSignRule,
    pub negative_factor: NegativeFactorRule,
    /// Verdict implied by the rules above, if any.
    pub expected_impulsive: Option<Verdict>,
}

/// Solutions computed along the way, reused by the caller.
#[derive(Debug, Clone)]
pub struct Solutions {
    pub system: CompanionSystem,
    pub impulsive: Trajectory,
    pub companions: Vec<Trajectory>,
}

fn max_gap(a: &Trajectory, b: &Trajectory, from: f64) -> f64 {
    let mut dev = 0.0_f64;
    for (j, &t) in a.grid().iter().enumerate() {
        if t < from {
            continue;
        }
        for (side, va) in [(Side::Right, a.values_right()[j]), (Side::Left, a.values_left()[j])] {
            if let Ok(vb) = b.evaluate(t, side) {
                dev = dev.max((va - vb).abs());
            }
        }
    }
    dev
}

/// Solves the impulsive problem and every companion independently, then
/// compares them through the projection and reconstruction maps and
/// compares the oscillation verdicts residue by residue.
pub fn verify_equivalence(
    sched: &ImpulseSchedule,
    spec: &DelaySpec,
    init: &InitialData,
    cfg: &SolveConfig,
    osc: &OscillationOptions,
) -> Result<(EquivalenceReport, Solutions), AnalysisError> {
    let system = CompanionSystem::new(sched, spec, init)?;
    let audit = check_assumptions(sched, system.grid(), spec, cfg.horizon, 2000);
    if !audit.residue_preservation.pass {
        return Err(AnalysisError::Assumptions(Box::new(audit)));
    }
    let grid = system.grid();
    let theta0 = grid.theta0();
    let ell = grid.ell();

    let (x, companions) = rayon::join(
        || solve_impulsive(spec, sched, init, cfg),
        || (0..=ell).into_par_iter().map(|i| solve_companion(&system, i, cfg)).collect::<Result<Vec<_>, _>>(),
    );
    let (x, companions) = (x?, companions?);

    let mut projection = Vec::with_capacity(ell + 1);
    for (i, y) in companions.iter().enumerate() {
        let projected = project(sched, grid, &x, i)?;
        let junction_mismatch = junction_mismatches(grid, &x, i)?.iter().fold(0.0_f64, |m, &(_, d)| m.max(d));
        let deviation = Deviation::new(max_gap(&projected, y, theta0), y.sup_abs(theta0, y.end()));
        projection.push(ProjectionRow { residue: i, deviation, junction_mismatch });
    }
    let rebuilt = reconstruct(sched, grid, &companions)?;
    let reconstruction = Deviation::new(max_gap(&rebuilt, &x, theta0), x.sup_abs(theta0, x.end()));

    let all_factors_positive = sched.impulses_between(f64::NEG_INFINITY, cfg.horizon).all(|k| sched.lambda(k).is_none_or(|l| l > 0.0));
    let impulsive = detect_oscillation(&x, osc);
    let mut verdicts = Vec::with_capacity(ell + 1);
    for (i, y) in companions.iter().enumerate() {
        let restricted = detect_oscillation_on_residue(&x, sched, i, osc);
        let t_min = system.horizon(i, osc.t_min.max(theta0))?;
        let companion = detect_oscillation(y, &OscillationOptions { t_min, ..*osc });
        let agree = all_factors_positive.then(|| restricted.verdict == companion.verdict);
        verdicts.push(VerdictRow { residue: i, impulsive: restricted, companion, agree });
    }

    let companion_signs: Vec<i8> = verdicts.iter().map(|v| v.companion.eventual_sign).collect();
    let mixed = all_factors_positive
        && verdicts.iter().all(|v| v.companion.verdict == Verdict::Nonoscillatory)
        && companion_signs.contains(&1)
        && companion_signs.contains(&-1);
    let negative = sched.has_negative_factor(cfg.horizon);
    let expected_impulsive = (mixed || negative).then_some(Verdict::Oscillatory);
    let oscillatory = impulsive.verdict == Verdict::Oscillatory;
    let consistent = |applies: bool| applies.then_some(oscillatory);

    let report = EquivalenceReport {
        projection,
        reconstruction,
        impulsive,
        mixed_signs: MixedSignRule { applies: mixed, companion_signs, consistent: consistent(mixed) },
        negative_factor: NegativeFactorRule { applies: negative, consistent: consistent(negative) },
        verdicts,
        all_factors_positive,
        expected_impulsive,
    };
    Ok((report, Solutions { system, impulsive: x, companions }))
}
