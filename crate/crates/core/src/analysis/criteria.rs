//! Oscillation and stability tests for `y'(t) + q·y(t − r) = 0`.

use std::f64::consts::{E, FRAC_PI_2};

use serde::Serialize;

use crate::trajectory::Side;
use crate::warp::{CompanionSystem, WarpError};

/// `q·r > 1/e`: every solution oscillates. For constant q and r this is
/// also necessary.
pub fn criterion_one_over_e(q: f64, delay: f64) -> bool {
    q * delay > 1.0 / E
}

/// `0 < q·r ≤ π/2`: the zero solution is asymptotically stable.
pub fn criterion_pi_over_two(q: f64, delay: f64) -> bool {
    q > 0.0 && q * delay <= FRAC_PI_2
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionRow {
    pub residue: usize,
    pub q: f64,
    pub delay: f64,
    pub one_over_e: bool,
    pub pi_over_two: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriteriaReport {
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub rows: Vec<CriterionRow>,
}

impl CriteriaReport {
    fn not_applicable(reason: impl Into<String>) -> Self {
        Self { applicable: false, reason: Some(reason.into()), rows: Vec::new() }
    }
}

/// Evaluates both criteria on every companion when p is a constant and τ a
/// constant shift. q_i and t − σ_i are sampled on the later half of the
/// companion horizon and must be constant there.
pub fn evaluate_criteria(system: &CompanionSystem, horizon: f64, samples: usize) -> Result<CriteriaReport, WarpError> {
    if system.spec().p.as_constant().is_none() {
        return Ok(CriteriaReport::not_applicable("p is not a constant"));
    }
    if system.spec().tau.as_shift().is_none() {
        return Ok(CriteriaReport::not_applicable("tau is not of the form t - c"));
    }
    let theta0 = system.grid().theta0();
    let samples = samples.max(2);
    let mut rows = Vec::with_capacity(system.residue_count());
    for i in 0..system.residue_count() {
        let end = system.horizon(i, horizon)?;
        let from = theta0 + 0.5 * (end - theta0);
        let mut q_range = (f64::INFINITY, f64::NEG_INFINITY);
        let mut d_range = q_range;
        for j in 0..samples {
            // dyadic sample times keep the warp arithmetic exact on integer grids
            let raw = from + (end - from) * j as f64 / (samples - 1) as f64;
            let snapped = (raw * 1024.0).round() / 1024.0;
            let t = if snapped >= from && snapped <= end { snapped } else { raw };
            let side = if j + 1 == samples { Side::Left } else { Side::Right };
            let q = system.q(i, t, side)?;
            let d = t - system.sigma(i, t, side)?;
            q_range = (q_range.0.min(q), q_range.1.max(q));
            d_range = (d_range.0.min(d), d_range.1.max(d));
        }
        let flat = |(lo, hi): (f64, f64)| hi - lo <= 1e-12 * hi.abs().max(1.0);
        if !flat(q_range) || !flat(d_range) {
            return Ok(CriteriaReport::not_applicable(format!(
                "companion {i} is not autonomous on the sampled horizon"
            )));
        }
        let (q, delay) = (q_range.0, d_range.0);
        rows.push(CriterionRow {
            residue: i,
            q,
            delay,
            one_over_e: criterion_one_over_e(q, delay),
            pi_over_two: criterion_pi_over_two(q, delay),
        });
    }
    Ok(CriteriaReport { applicable: true, reason: None, rows })
}
