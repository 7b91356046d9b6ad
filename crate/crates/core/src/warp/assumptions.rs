//! Sampled checks of the standing hypotheses on a finite horizon.

use serde::Serialize;

use crate::problem::DelaySpec;
use crate::schedule::ImpulseSchedule;
use crate::trajectory::Side;

use super::{ResidueGrid, WarpError, WarpGrid};

/// Outcome of one check, with the first offending time if any.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub pass: bool,
    pub witness: Option<f64>,
    pub detail: Option<String>,
}

impl Check {
    fn ok() -> Self {
        Self { pass: true, witness: None, detail: None }
    }

    fn fail(witness: Option<f64>, detail: String) -> Self {
        Self { pass: false, witness, detail: Some(detail) }
    }
}

/// Sampled suprema of one family of impulse-factor sums
/// `Σ_i |Π{factor : s < point ≤ t}|` over pairs `s ≤ t` in the horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundFamily {
    /// Supremum over all sampled pairs (the uniform constant).
    pub sup_all: f64,
    /// Supremum over t with s fixed at θ_0.
    pub sup_from_start: f64,
    /// Set when the supremum is still increasing over the last tenth of
    /// the horizon; a finite window cannot show boundedness in that case.
    pub growing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub residue: usize,
    /// max |α_i(σ_i(t)) − τ(α_i(t))| over samples, when σ_i is defined.
    pub max_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub horizon: f64,
    pub samples: usize,
    pub finite_coefficient: Check,
    pub retarded_argument: Check,
    pub nonzero_factors: Check,
    pub residue_preservation: Check,
    pub sigma_residuals: Vec<ResidualRow>,
    pub positive_factors: Check,
    /// Σ|Π 1/λ| over junctions ϑ ∈ (s, t].
    pub inverted_products: BoundFamily,
    /// Σ|Π λ| over junctions ϑ ∈ (s, t].
    pub direct_products: BoundFamily,
    /// Σ|Π λ| over impulse times θ ∈ (s, t].
    pub direct_products_theta: BoundFamily,
    /// Retarded argument, nonzero factors and residue preservation all hold.
    pub pass: bool,
}

fn sample_points(sched: &ImpulseSchedule, t0: f64, horizon: f64, samples: usize) -> Vec<f64> {
    let samples = samples.max(2);
    let mut pts: Vec<f64> = (0..samples)
        .map(|j| if j + 1 == samples { horizon } else { t0 + (horizon - t0) * j as f64 / (samples - 1) as f64 })
        .collect();
    let times = sched.times();
    for w in times.windows(2) {
        if w[0] >= t0 && w[0] <= horizon {
            pts.push(w[0]);
            if w[1] <= horizon {
                pts.push(0.5 * (w[0] + w[1]));
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Samples the hypotheses over `[θ_0, horizon]`.
///
/// Residue preservation asks that t and τ(t) lie in blocks of the same
/// residue class, τ(t) no further back than the history blocks; the witness
/// is the first sampled t where this fails.
pub fn check_assumptions(
    sched: &ImpulseSchedule,
    grid: &WarpGrid,
    spec: &DelaySpec,
    horizon: f64,
    samples: usize,
) -> AssumptionReport {
    let t0 = sched.theta0();
    let pts = sample_points(sched, t0, horizon, samples);

    let mut finite_coefficient = Check::ok();
    for &t in &pts {
        if let Err(err) = spec.p.eval(t) {
            finite_coefficient = Check::fail(Some(t), err.to_string());
            break;
        }
    }

    let mut retarded_argument = Check::ok();
    for &t in &pts {
        match spec.tau.eval(t) {
            Ok(a) if a <= t => {}
            Ok(a) => {
                retarded_argument = Check::fail(Some(t), format!("τ({t}) = {a} > {t}"));
                break;
            }
            Err(err) => {
                retarded_argument = Check::fail(Some(t), err.to_string());
                break;
            }
        }
    }

    let in_range: Vec<i64> = sched.impulses_between(f64::NEG_INFINITY, horizon).collect();
    let nonzero_factors = match in_range.iter().find(|&&k| sched.lambda(k) == Some(0.0)) {
        Some(&k) => Check::fail(sched.theta(k), format!("λ_{k} = 0")),
        None => Check::ok(),
    };
    let positive_factors = match in_range.iter().find(|&&k| sched.lambda(k).is_some_and(|l| l < 0.0)) {
        Some(&k) => Check::fail(sched.theta(k), format!("λ_{k} = {} < 0", sched.lambda(k).unwrap_or(0.0))),
        None => Check::ok(),
    };

    let mut residue_preservation = Check::ok();
    let n = sched.n_history() as i64;
    for &t in &pts {
        let Some((i, _)) = sched.residue_block(t) else {
            residue_preservation = Check::fail(Some(t), format!("t = {t} is beyond the impulse schedule"));
            break;
        };
        let Ok(image) = spec.tau.eval(t) else { continue };
        match sched.residue_block(image) {
            Some((j, m)) if j == i && m >= -n => {}
            Some((j, _)) if j == i => {
                residue_preservation =
                    Check::fail(Some(t), format!("τ({t}) = {image} lies before the history blocks"));
                break;
            }
            Some((j, _)) => {
                residue_preservation = Check::fail(
                    Some(t),
                    format!("t = {t} is in a residue-{i} block but τ(t) = {image} is in a residue-{j} block"),
                );
                break;
            }
            None => {
                residue_preservation =
                    Check::fail(Some(t), format!("τ({t}) = {image} lies outside the impulse schedule"));
                break;
            }
        }
    }

    let sigma_residuals = grid
        .residues()
        .iter()
        .map(|r| ResidualRow {
            residue: r.residue(),
            max_residual: if residue_preservation.pass {
                sigma_residual(grid, r, spec, horizon, samples).ok()
            } else {
                None
            },
        })
        .collect();

    let inverted_products = junction_bounds(grid, horizon, true);
    let direct_products = junction_bounds(grid, horizon, false);
    let direct_products_theta = theta_bounds(grid, t0, horizon);

    let pass = retarded_argument.pass && nonzero_factors.pass && residue_preservation.pass;
    AssumptionReport {
        horizon,
        samples,
        finite_coefficient,
        retarded_argument,
        nonzero_factors,
        residue_preservation,
        sigma_residuals,
        positive_factors,
        inverted_products,
        direct_products,
        direct_products_theta,
        pass,
    }
}

fn sigma_residual(
    grid: &WarpGrid,
    r: &ResidueGrid,
    spec: &DelaySpec,
    horizon: f64,
    samples: usize,
) -> Result<f64, WarpError> {
    let i = r.residue();
    let t0 = grid.theta0();
    let end = grid.warped_position(i, horizon)?;
    let samples = samples.max(2);
    let mut worst: f64 = 0.0;
    for j in 0..samples {
        let t = t0 + (end - t0) * j as f64 / (samples - 1) as f64;
        if r.alpha(t, Side::Right).is_err() {
            continue;
        }
        let sigma = grid.sigma(i, &spec.tau, t, Side::Right)?;
        let lhs = r.alpha(sigma, Side::Right)?;
        let rhs = spec.tau.eval(r.alpha(t, Side::Right)?)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

// Σ_i |Π| for s, t over the event points. Each residue contributes a log
// magnitude L_i(x) that is a step function of x, so evaluating at the
// event points covers every distinct value.
fn family_bounds(events: &[f64], start: f64, end: f64, logs: &dyn Fn(usize, f64) -> Vec<f64>) -> BoundFamily {
    let mut pts: Vec<f64> = std::iter::once(start)
        .chain(events.iter().copied().filter(|&v| v > start && v <= end))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let cut = start + 0.9 * (end - start);
    let table: Vec<Vec<f64>> = pts.iter().enumerate().map(|(j, &x)| logs(j, x)).collect();
    let mut sup_all: f64 = 0.0;
    let mut sup_cut: f64 = 0.0;
    let mut sup_from_start: f64 = 0.0;
    for (a, la) in table.iter().enumerate() {
        for (b, lb) in table.iter().enumerate().skip(a) {
            let sum: f64 = la.iter().zip(lb).map(|(x, y)| (y - x).exp()).sum();
            sup_all = sup_all.max(sum);
            if pts[b] <= cut {
                sup_cut = sup_cut.max(sum);
            }
            if a == 0 {
                sup_from_start = sup_from_start.max(sum);
            }
        }
    }
    BoundFamily { sup_all, sup_from_start, growing: sup_all > sup_cut * (1.0 + 1e-9) }
}

fn log_abs_product(r: &ResidueGrid, count: usize, inverted: bool) -> f64 {
    let v = r.log_abs_prefix(count).unwrap_or(0.0);
    if inverted {
        -v
    } else {
        v
    }
}

fn junction_bounds(grid: &WarpGrid, horizon: f64, inverted: bool) -> BoundFamily {
    let t0 = grid.theta0();
    let mut events = Vec::new();
    let mut end = t0;
    for r in grid.residues() {
        let e = grid.warped_position(r.residue(), horizon).unwrap_or(t0);
        end = end.max(e);
        events.extend(r.vartheta().iter().copied().filter(|&v| v >= t0 && v <= e));
    }
    let logs = |_: usize, x: f64| -> Vec<f64> {
        grid.residues()
            .iter()
            .map(|r| {
                let count = r.junctions_up_to(x, Side::Right);
                log_abs_product(r, count, inverted)
            })
            .collect()
    };
    family_bounds(&events, t0, end, &logs)
}

fn theta_bounds(grid: &WarpGrid, t0: f64, horizon: f64) -> BoundFamily {
    let mut events = Vec::new();
    for r in grid.residues() {
        let mut j = 0;
        while let Some(th) = r.block(j).map(|b| b.0) {
            if th > horizon {
                break;
            }
            events.push(th);
            j += 1;
        }
    }
    let logs = |_: usize, x: f64| -> Vec<f64> {
        grid.residues()
            .iter()
            .map(|r| {
                log_abs_product(r, r.impulses_up_to(x, Side::Right), false)
            })
            .collect()
    };
    family_bounds(&events, t0, horizon, &logs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ScalarFn;
    use crate::schedule::Factors;
    use crate::warp::build_warp_grid;

    fn report(ell: usize, n: usize, lambda: Vec<f64>, tau: &str) -> AssumptionReport {
        let sched = ImpulseSchedule::uniform(0.0, 1.0, 20.0, &Factors::Cyclic(lambda), ell, n).unwrap();
        let grid = build_warp_grid(&sched).unwrap();
        let spec = DelaySpec::new(ScalarFn::constant(0.5), ScalarFn::parse(tau).unwrap());
        check_assumptions(&sched, &grid, &spec, 20.0, 200)
    }

    #[test]
    fn example_configuration_passes() {
        for (ell, n) in [(0, 1), (1, 1), (2, 1), (1, 2), (3, 2)] {
            let r = report(ell, n, vec![1.0; ell + 1], &format!("t - {}", n * (ell + 1)));
            assert!(r.pass, "ℓ = {ell}, n = {n}: {r:?}");
            assert!(r.sigma_residuals.iter().all(|row| row.max_residual == Some(0.0)));
            assert!(!r.inverted_products.growing && !r.direct_products_theta.growing);
            assert_eq!(r.inverted_products.sup_all, (ell + 1) as f64);
        }
    }

    #[test]
    fn residue_violation_has_witness() {
        let r = report(1, 1, vec![1.0], "t - 1");
        assert!(!r.pass);
        assert!(!r.residue_preservation.pass);
        assert_eq!(r.residue_preservation.witness, Some(0.0));
        assert!(r.sigma_residuals.iter().all(|row| row.max_residual.is_none()));
    }

    #[test]
    fn advanced_argument_is_reported() {
        let r = report(0, 1, vec![1.0], "t + 0.5");
        assert!(!r.retarded_argument.pass);
        assert_eq!(r.retarded_argument.witness, Some(0.0));
    }

    #[test]
    fn halving_factors_grow_inverted_products() {
        let r = report(0, 1, vec![0.5], "t - 1");
        assert!(r.pass);
        assert!(r.inverted_products.growing);
        assert!(r.inverted_products.sup_all >= 2f64.powi(19));
        assert!(!r.direct_products.growing);
    }

    #[test]
    fn negative_factors_fail_positivity_only() {
        let r = report(1, 1, vec![1.0, -1.0], "t - 2");
        assert!(r.pass);
        assert!(!r.positive_factors.pass);
        assert_eq!(r.positive_factors.witness, Some(1.0));
    }
}
