//! Junction grids ϑ^i and the warps α_i, β_i.

use crate::schedule::ImpulseSchedule;
use crate::trajectory::{snap_tol, Side};

use super::WarpError;

/// Factor products with more terms than this are formed from logarithms.
const DIRECT_PRODUCT_LIMIT: usize = 64;

/// Compressed timeline of one residue class.
///
/// Block `m` of residue `i` is the real interval
/// `[θ_{m(ℓ+1)+i}, θ_{m(ℓ+1)+i+1})`; on the compressed timeline it occupies
/// `[ϑ_m, ϑ_{m+1})` with `ϑ_0 = θ_0`. Blocks run from `−n` to the last one
/// whose right end is still in the schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueGrid {
    residue: usize,
    period: usize,
    first_block: i64,
    vartheta: Vec<f64>,
    starts: Vec<f64>,
    ends: Vec<f64>,
    // λ_{j(ℓ+1)+i} and θ_{j(ℓ+1)+i} for j = 0, 1, ... while in the schedule
    factors: Vec<f64>,
    impulse_times: Vec<f64>,
    log_prefix: Vec<f64>,
    neg_prefix: Vec<u32>,
}

impl ResidueGrid {
    pub(super) fn build(sched: &ImpulseSchedule, residue: usize) -> Result<Self, WarpError> {
        let period = sched.period() as i64;
        let n = sched.n_history() as i64;
        let k_max = sched.last_index();
        let last_block = (k_max - residue as i64 - 1).div_euclid(period);
        if last_block < 0 {
            return Err(WarpError::ScheduleTooShort { needed: period + residue as i64 });
        }
        let mut starts = Vec::new();
        let mut ends = Vec::new();
        for m in -n..=last_block {
            let k = m * period + residue as i64;
            starts.push(sched.theta_checked(k)?);
            ends.push(sched.theta_checked(k + 1)?);
        }
        let zero = n as usize;
        let mut vartheta = vec![0.0; starts.len() + 1];
        vartheta[zero] = sched.theta0();
        for pos in zero..starts.len() {
            vartheta[pos + 1] = vartheta[pos] + (ends[pos] - starts[pos]);
        }
        for pos in (0..zero).rev() {
            vartheta[pos] = vartheta[pos + 1] - (ends[pos] - starts[pos]);
        }

        let mut factors = Vec::new();
        let mut impulse_times = Vec::new();
        let mut k = residue as i64;
        while let (Some(l), Some(th)) = (sched.lambda(k), sched.theta(k)) {
            factors.push(l);
            impulse_times.push(th);
            k += period;
        }
        let mut log_prefix = vec![0.0];
        let mut neg_prefix = vec![0u32];
        for &l in &factors {
            log_prefix.push(log_prefix[log_prefix.len() - 1] + l.abs().ln());
            neg_prefix.push(neg_prefix[neg_prefix.len() - 1] + u32::from(l < 0.0));
        }
        Ok(Self {
            residue,
            period: sched.period(),
            first_block: -n,
            vartheta,
            starts,
            ends,
            factors,
            impulse_times,
            log_prefix,
            neg_prefix,
        })
    }

    pub fn residue(&self) -> usize {
        self.residue
    }

    /// −n.
    pub fn first_block(&self) -> i64 {
        self.first_block
    }

    pub fn last_block(&self) -> i64 {
        self.first_block + self.starts.len() as i64 - 1
    }

    /// ϑ_m for m = −n, …, last_block + 1.
    pub fn vartheta(&self) -> &[f64] {
        &self.vartheta
    }

    pub fn vartheta_at(&self, m: i64) -> Option<f64> {
        let pos = usize::try_from(m - self.first_block).ok()?;
        self.vartheta.get(pos).copied()
    }

    /// Real interval of block `m`.
    pub fn block(&self, m: i64) -> Option<(f64, f64)> {
        let pos = usize::try_from(m - self.first_block).ok()?;
        Some((*self.starts.get(pos)?, self.ends[pos]))
    }

    pub fn domain_start(&self) -> f64 {
        self.vartheta[0]
    }

    pub fn domain_end(&self) -> f64 {
        self.vartheta[self.vartheta.len() - 1]
    }

    fn block_id(&self, pos: usize) -> i64 {
        self.first_block + pos as i64
    }

    /// Block of the compressed time `t`: `ϑ_m ≤ t < ϑ_{m+1}` for `Right`,
    /// `ϑ_m < t ≤ ϑ_{m+1}` for `Left`.
    pub fn warped_block(&self, t: f64, side: Side) -> Result<i64, WarpError> {
        self.locate_warped(t, side).map(|(pos, _)| self.block_id(pos))
    }

    // (block position, snapped offset into the block)
    fn locate_warped(&self, t: f64, side: Side) -> Result<(usize, f64), WarpError> {
        let tol = snap_tol(t);
        let nb = self.starts.len();
        let below = || WarpError::BelowDomain { residue: self.residue, t, start: self.domain_start() };
        let beyond = || WarpError::BeyondDomain { residue: self.residue, t, end: self.domain_end() };
        match side {
            Side::Right => {
                let j = self.vartheta[..nb].partition_point(|&v| v <= t + tol);
                if j == 0 {
                    return Err(below());
                }
                let pos = j - 1;
                if (t - self.vartheta[pos]).abs() <= tol {
                    return Ok((pos, 0.0));
                }
                if t < self.vartheta[pos + 1] {
                    Ok((pos, t - self.vartheta[pos]))
                } else {
                    Err(beyond())
                }
            }
            Side::Left => {
                let pos = self.vartheta[1..].partition_point(|&v| v < t - tol);
                if pos == nb {
                    return Err(beyond());
                }
                let len = self.ends[pos] - self.starts[pos];
                if (t - self.vartheta[pos + 1]).abs() <= tol {
                    return Ok((pos, len));
                }
                if t > self.vartheta[pos] {
                    Ok((pos, t - self.vartheta[pos]))
                } else if (t - self.vartheta[pos]).abs() <= tol {
                    Ok((pos, 0.0))
                } else {
                    Err(below())
                }
            }
        }
    }

    /// α_i(t), or its left limit for `Side::Left`.
    pub fn alpha(&self, t: f64, side: Side) -> Result<f64, WarpError> {
        let (pos, off) = self.locate_warped(t, side)?;
        let len = self.ends[pos] - self.starts[pos];
        Ok(if off == len { self.ends[pos] } else { self.starts[pos] + off })
    }

    /// Block of the real time `t`: `start ≤ t < end` for `Right`,
    /// `start < t ≤ end` for `Left` (falling back to `Right` at a block start).
    pub fn real_block(&self, t: f64, side: Side) -> Result<i64, WarpError> {
        self.locate_real(t, side).map(|(pos, _)| self.block_id(pos))
    }

    fn locate_real(&self, t: f64, side: Side) -> Result<(usize, f64), WarpError> {
        let tol = snap_tol(t);
        let nb = self.starts.len();
        if side == Side::Left {
            let pos = self.ends.partition_point(|&e| e < t - tol);
            if pos < nb {
                if (t - self.ends[pos]).abs() <= tol {
                    return Ok((pos, self.ends[pos] - self.starts[pos]));
                }
                if t > self.starts[pos] {
                    return Ok((pos, t - self.starts[pos]));
                }
            }
        }
        let j = self.starts.partition_point(|&s| s <= t + tol);
        if j == 0 {
            return Err(WarpError::BelowDomain { residue: self.residue, t, start: self.starts[0] });
        }
        let pos = j - 1;
        if (t - self.starts[pos]).abs() <= tol {
            return Ok((pos, 0.0));
        }
        if t < self.ends[pos] {
            return Ok((pos, t - self.starts[pos]));
        }
        if pos + 1 == nb {
            return Err(WarpError::BeyondDomain { residue: self.residue, t, end: self.ends[pos] });
        }
        Err(WarpError::NotInResidue {
            residue: self.residue,
            t,
            gap_start: self.ends[pos],
            gap_end: self.starts[pos + 1],
        })
    }

    /// β_i(t) for t in the residue-i block union.
    pub fn beta(&self, t: f64, side: Side) -> Result<f64, WarpError> {
        let (pos, off) = self.locate_real(t, side)?;
        let len = self.ends[pos] - self.starts[pos];
        Ok(if off == len { self.vartheta[pos + 1] } else { self.vartheta[pos] + off })
    }

    /// Number of j ∈ ℕ_0 with ϑ_j ≤ t (`Right`) or ϑ_j < t (`Left`).
    pub fn junctions_up_to(&self, t: f64, side: Side) -> usize {
        let zero = (-self.first_block) as usize;
        let tol = snap_tol(t);
        let grid = &self.vartheta[zero..];
        match side {
            Side::Right => grid.partition_point(|&v| v <= t + tol),
            Side::Left => grid.partition_point(|&v| v < t - tol),
        }
    }

    /// Number of j ∈ ℕ_0 with θ_{j(ℓ+1)+i} ≤ t (`Right`) or < t (`Left`).
    pub fn impulses_up_to(&self, t: f64, side: Side) -> usize {
        let tol = snap_tol(t);
        match side {
            Side::Right => self.impulse_times.partition_point(|&v| v <= t + tol),
            Side::Left => self.impulse_times.partition_point(|&v| v < t - tol),
        }
    }

    /// Product of λ_{j(ℓ+1)+i} (or their reciprocals) for `lo ≤ j < hi`.
    pub fn factor_product(&self, lo: usize, hi: usize, inverted: bool) -> Result<f64, WarpError> {
        if hi <= lo {
            return Ok(1.0);
        }
        if hi > self.factors.len() {
            let needed = ((hi - 1) * self.period + self.residue) as i64;
            return Err(WarpError::ScheduleTooShort { needed });
        }
        if hi - lo <= DIRECT_PRODUCT_LIMIT {
            let mut acc = 1.0;
            for &l in &self.factors[lo..hi] {
                if inverted {
                    acc /= l;
                } else {
                    acc *= l;
                }
            }
            return Ok(acc);
        }
        let log = self.log_prefix[hi] - self.log_prefix[lo];
        let neg = self.neg_prefix[hi] - self.neg_prefix[lo];
        let sign = if neg.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(sign * if inverted { (-log).exp() } else { log.exp() })
    }

    /// Σ_{j<count} ln|λ_{j(ℓ+1)+i}|, if all those factors are known.
    pub fn log_abs_prefix(&self, count: usize) -> Option<f64> {
        self.log_prefix.get(count).copied()
    }
}
