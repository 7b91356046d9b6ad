//! Moving solutions between the impulsive equation and its companions.

use crate::problem::ScalarFn;
use crate::schedule::ImpulseSchedule;
use crate::solver::{DelayEquation, History, SolveError};
use crate::trajectory::{snap_tol, Side, Trajectory};

use super::{ResidueGrid, WarpError, WarpGrid};

fn prefix(r: &ResidueGrid, m: i64, inverted: bool) -> Result<f64, WarpError> {
    if m < 0 {
        Ok(1.0)
    } else {
        r.factor_product(0, m as usize + 1, inverted)
    }
}

struct Projected {
    traj: Trajectory,
    mismatches: Vec<(f64, f64)>,
}

fn project_impl(x: &Trajectory, grid: &WarpGrid, i: usize) -> Result<Projected, WarpError> {
    let r = grid.residue(i)?;
    let theta0 = grid.theta0();
    let (xg, xr) = (x.grid(), x.values_right());
    let mut ts = Vec::new();
    let mut lefts = Vec::new();
    let mut rights = Vec::new();
    let mut mismatches = Vec::new();
    let mut carry: Option<f64> = None;
    let mut last_vartheta = None;
    let mut reached_solution = false;

    for m in r.first_block()..=r.last_block() {
        let (s, e) = r.block(m).expect("block in range");
        if s > x.end() + snap_tol(s) {
            break;
        }
        if s < x.start() - snap_tol(s) {
            continue;
        }
        reached_solution |= m >= 0;
        let scale = prefix(r, m, true)?;
        let v_m = r.vartheta_at(m).expect("junction in range");
        let right = scale * x.evaluate(s, Side::Right)?;
        let left = match carry.take() {
            Some(c) if m < 0 => c,
            Some(c) => {
                mismatches.push((v_m, (c - right).abs()));
                right
            }
            None => right,
        };
        ts.push(v_m);
        lefts.push(left);
        rights.push(right);

        let lo = xg.partition_point(|&g| g <= s + snap_tol(s));
        let hi = xg.partition_point(|&g| g < e - snap_tol(e));
        for j in lo..hi {
            let v = scale * xr[j];
            ts.push(v_m + (xg[j] - s));
            lefts.push(v);
            rights.push(v);
        }
        if e <= x.end() + snap_tol(e) {
            carry = Some(scale * x.evaluate(e, Side::Left)?);
            last_vartheta = r.vartheta_at(m + 1);
        } else {
            let v = scale * x.evaluate(x.end(), Side::Left)?;
            let t_end = v_m + (x.end() - s);
            if t_end > ts[ts.len() - 1] {
                ts.push(t_end);
                lefts.push(v);
                rights.push(v);
            }
            break;
        }
    }
    if let (Some(c), Some(v)) = (carry, last_vartheta) {
        ts.push(v);
        lefts.push(c);
        rights.push(c);
    }
    if !reached_solution || ts.is_empty() {
        return Err(WarpError::Coverage { residue: i });
    }
    let marks = (0..ts.len()).filter(|&j| lefts[j].to_bits() != rights[j].to_bits()).collect();
    let traj = Trajectory::new(theta0, ts, rights, lefts, marks)?;
    Ok(Projected { traj, mismatches })
}

/// `y_i(t) = Π{1/λ_{j(ℓ+1)+i} : ϑ^i_j ≤ t, j ≥ 0} · x(α_i(t))`, sampled at the
/// β_i-images of the grid of `x` inside residue-i blocks and at the
/// junctions ϑ^i_m. Only history junctions (m < 0) may carry a jump.
pub fn project(
    _sched: &ImpulseSchedule,
    grid: &WarpGrid,
    x: &Trajectory,
    i: usize,
) -> Result<Trajectory, WarpError> {
    project_impl(x, grid, i).map(|p| p.traj)
}

/// `(ϑ^i_m, |y_i(ϑ_m⁺) − y_i(ϑ_m⁻)|)` for the junctions m ≥ 0 reached by `x`.
/// For an exact solution these all vanish.
pub fn junction_mismatches(
    grid: &WarpGrid,
    x: &Trajectory,
    i: usize,
) -> Result<Vec<(f64, f64)>, WarpError> {
    project_impl(x, grid, i).map(|p| p.mismatches)
}

#[derive(Debug, Clone, Copy, Default)]
struct Entry {
    t: f64,
    left: Option<f64>,
    right: Option<f64>,
}

/// `x(t) = Σ_μ χ_μ(t) · Π{λ_{j(ℓ+1)+μ} : θ_{j(ℓ+1)+μ} ≤ t, j ≥ 0} · y_μ(β_μ(t))`.
///
/// The grid is the union of the α_μ-images of the companion grids; both
/// one-sided values are filled in at every block boundary. The result ends
/// where the first companion runs out.
pub fn reconstruct(
    sched: &ImpulseSchedule,
    grid: &WarpGrid,
    companions: &[Trajectory],
) -> Result<Trajectory, WarpError> {
    if companions.len() != grid.residue_count() {
        return Err(WarpError::CompanionCount { expected: grid.residue_count(), got: companions.len() });
    }
    let mut entries: Vec<Entry> = Vec::new();
    let mut limit = f64::INFINITY;
    for (mu, y) in companions.iter().enumerate() {
        let r = grid.residue(mu)?;
        let junctions: Vec<f64> = r
            .vartheta()
            .iter()
            .copied()
            .filter(|&v| v >= y.start() - snap_tol(v) && v <= y.end() + snap_tol(v))
            .collect();
        let mut times: Vec<f64> = y.grid().iter().copied().chain(junctions.iter().copied()).collect();
        times.sort_by(f64::total_cmp);
        times.dedup_by(|b, a| (*b - *a).abs() <= snap_tol(*a));

        for &tw in &times {
            let junction = junctions.iter().position(|&v| (v - tw).abs() <= snap_tol(tw));
            if junction.is_some() {
                let m = r.warped_block(tw, Side::Right).ok();
                let m_left = r.warped_block(tw, Side::Left).ok();
                if let Some(ml) = m_left.filter(|&ml| Some(ml) != m) {
                    let (_, end) = r.block(ml).expect("block in range");
                    let v = prefix(r, ml, false)? * y.evaluate(tw, Side::Left)?;
                    entries.push(Entry { t: end, left: Some(v), right: None });
                }
                if let Some(m) = m {
                    let (start, _) = r.block(m).expect("block in range");
                    let v = prefix(r, m, false)? * y.evaluate(tw, Side::Right)?;
                    entries.push(Entry { t: start, left: None, right: Some(v) });
                }
            } else {
                let m = r.warped_block(tw, Side::Right)?;
                let real = r.alpha(tw, Side::Right)?;
                let v = prefix(r, m, false)? * y.evaluate(tw, Side::Right)?;
                entries.push(Entry { t: real, left: Some(v), right: Some(v) });
            }
        }
        let end = y.end();
        let reach = match r.warped_block(end, Side::Right) {
            Ok(m) if (r.vartheta_at(m).unwrap_or(f64::NAN) - end).abs() <= snap_tol(end) => {
                r.block(m).map_or(f64::NEG_INFINITY, |b| b.0)
            }
            _ => r.alpha(end, Side::Left)?,
        };
        limit = limit.min(reach);
    }

    entries.sort_by(|a, b| a.t.total_cmp(&b.t));
    let mut merged: Vec<Entry> = Vec::with_capacity(entries.len());
    for e in entries {
        if e.t > limit + snap_tol(limit) {
            break;
        }
        match merged.last_mut() {
            Some(last) if (e.t - last.t).abs() <= snap_tol(e.t) => {
                last.left = last.left.or(e.left);
                last.right = last.right.or(e.right);
            }
            _ => merged.push(e),
        }
    }
    let ts: Vec<f64> = merged.iter().map(|e| e.t).collect();
    if ts.is_empty() {
        return Err(WarpError::Coverage { residue: 0 });
    }
    let lefts: Vec<f64> = merged.iter().map(|e| e.left.or(e.right).unwrap_or(0.0)).collect();
    let rights: Vec<f64> = merged.iter().map(|e| e.right.or(e.left).unwrap_or(0.0)).collect();
    let mut marks: Vec<usize> = (0..ts.len()).filter(|&j| lefts[j].to_bits() != rights[j].to_bits()).collect();
    for k in sched.impulses_between(ts[0], ts[ts.len() - 1]) {
        let th = sched.theta(k).expect("impulse index in range");
        let j = ts.partition_point(|&g| g < th - snap_tol(th));
        if j < ts.len() && (ts[j] - th).abs() <= snap_tol(th) {
            marks.push(j);
        }
    }
    Ok(Trajectory::new(grid.theta0(), ts, rights, lefts, marks)?)
}

/// Coefficient of the impulsive equation assembled from companion data:
/// `Σ_μ χ_μ(t) · Π{λ_{j(ℓ+1)+μ} : τ(t) < θ_{j(ℓ+1)+μ} ≤ t} · q_μ(β_μ(t))`,
/// with deviating argument τ.
#[derive(Debug, Clone)]
pub struct AssembledEquation {
    grid: WarpGrid,
    tau: ScalarFn,
    q: Vec<ScalarFn>,
}

impl AssembledEquation {
    pub fn coefficient_at(&self, t: f64, side: Side) -> Result<f64, WarpError> {
        let mu = self.grid.residue_of(t, side).ok_or(WarpError::Uncovered { t })?;
        let r = self.grid.residue(mu)?;
        let s = self.tau.eval(t)?;
        let lo = r.impulses_up_to(s, side);
        let hi = r.impulses_up_to(t, side);
        let product = r.factor_product(lo, hi, false)?;
        Ok(product * self.q[mu].eval(r.beta(t, side)?)?)
    }
}

impl DelayEquation for AssembledEquation {
    fn coefficient(&self, t: f64, side: Side) -> Result<f64, SolveError> {
        Ok(self.coefficient_at(t, side)?)
    }

    fn argument(&self, t: f64, _side: Side) -> Result<f64, SolveError> {
        Ok(self.tau.eval(t)?)
    }
}

/// Initial function `Σ_μ χ_μ · (φ_μ ∘ β_μ)` on the history blocks.
#[derive(Debug, Clone)]
pub struct AssembledInitial {
    grid: WarpGrid,
    phi: Vec<ScalarFn>,
}

impl AssembledInitial {
    pub fn value_at(&self, t: f64, side: Side) -> Result<f64, WarpError> {
        let theta0 = self.grid.theta0();
        let side = if t >= theta0 - snap_tol(theta0) { Side::Left } else { side };
        let mu = self.grid.residue_of(t, side).ok_or(WarpError::Uncovered { t })?;
        let r = self.grid.residue(mu)?;
        Ok(self.phi[mu].eval(r.beta(t, side)?)?)
    }
}

impl History for AssembledInitial {
    fn value(&self, t: f64, side: Side) -> Result<f64, SolveError> {
        Ok(self.value_at(t, side)?)
    }
}

/// Builds the impulsive problem whose residue-μ companions are
/// `y' + q_μ(t)·y(σ_μ(t)) = 0` with initial functions `φ_μ`.
pub fn build_impulsive_from_companions(
    grid: &WarpGrid,
    tau: &ScalarFn,
    q: Vec<ScalarFn>,
    phi: Vec<ScalarFn>,
) -> Result<(AssembledEquation, AssembledInitial), WarpError> {
    let expected = grid.residue_count();
    if q.len() != expected || phi.len() != expected {
        return Err(WarpError::CompanionCount { expected, got: q.len().min(phi.len()) });
    }
    Ok((
        AssembledEquation { grid: grid.clone(), tau: tau.clone(), q },
        AssembledInitial { grid: grid.clone(), phi },
    ))
}
