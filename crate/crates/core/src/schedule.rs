//! Impulse times and impulse factors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("impulse times must be strictly increasing (θ_{k} ≥ θ_{next})", next = .k + 1)]
    NotIncreasing { k: i64 },
    #[error("impulse time θ_{k} is not finite")]
    NonFinite { k: i64 },
    #[error("impulse factor λ_{k} is zero")]
    ZeroFactor { k: i64 },
    #[error("impulse factor λ_{k} is missing")]
    MissingFactor { k: i64 },
    #[error("need at least {needed} impulse times (history blocks plus θ_0 and θ_1), got {got}")]
    TooFewTimes { needed: usize, got: usize },
    #[error("schedule too short: index {needed} is beyond the last impulse time")]
    TooShort { needed: i64 },
    #[error("impulse period must be positive and finite, got {0}")]
    BadPeriod(f64),
    #[error("cyclic factor list is empty")]
    EmptyCycle,
}

/// How impulse factors are laid out over k = 0, 1, 2, ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "lowercase")]
pub enum Factors {
    /// λ_k = values[k mod len].
    Cyclic(Vec<f64>),
    /// λ_k = values[k]; must cover every impulse index.
    Explicit(Vec<f64>),
}

impl Factors {
    fn expand(&self, count: usize) -> Result<Vec<f64>, ScheduleError> {
        match self {
            Factors::Cyclic(values) => {
                if values.is_empty() {
                    return Err(ScheduleError::EmptyCycle);
                }
                Ok((0..count).map(|k| values[k % values.len()]).collect())
            }
            Factors::Explicit(values) => {
                if values.len() < count {
                    return Err(ScheduleError::MissingFactor { k: values.len() as i64 });
                }
                Ok(values[..count].to_vec())
            }
        }
    }
}

/// Impulse times θ_k for k = −n(ℓ+1), …, K_max together with factors λ_k for
/// k = 0, …, K_max, the retardation depth ℓ and the number of history blocks n.
///
/// The points with negative index are history points; the first one plays
/// the role of the left end of the initial interval. Impulses act only at
/// k ≥ 0 through `x(θ_k) = λ_k · x(θ_{k−ℓ}⁻)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseSchedule {
    theta: Vec<f64>,
    lambda: Vec<f64>,
    ell: usize,
    n_history: usize,
}

impl ImpulseSchedule {
    /// `theta[0]` is θ_{−n(ℓ+1)}; `lambda[0]` is λ_0.
    pub fn new(
        theta: Vec<f64>,
        factors: &Factors,
        ell: usize,
        n_history: usize,
    ) -> Result<Self, ScheduleError> {
        let n_history = n_history.max(1);
        let offset = n_history * (ell + 1);
        let needed = offset + 2;
        if theta.len() < needed {
            return Err(ScheduleError::TooFewTimes { needed, got: theta.len() });
        }
        for (pos, w) in theta.windows(2).enumerate() {
            let k = pos as i64 - offset as i64;
            if !w[0].is_finite() {
                return Err(ScheduleError::NonFinite { k });
            }
            if w[1] <= w[0] {
                return Err(ScheduleError::NotIncreasing { k });
            }
        }
        if !theta[theta.len() - 1].is_finite() {
            return Err(ScheduleError::NonFinite { k: (theta.len() - 1 - offset) as i64 });
        }
        let lambda = factors.expand(theta.len() - offset)?;
        if let Some(k) = lambda.iter().position(|&l| l == 0.0 || !l.is_finite()) {
            return Err(ScheduleError::ZeroFactor { k: k as i64 });
        }
        Ok(Self { theta, lambda, ell, n_history })
    }

    /// θ_k = start + k·period for k = −n(ℓ+1), …, K_max, with K_max chosen so
    /// that the schedule reaches past `horizon` by at least ℓ+2 periods.
    pub fn uniform(
        start: f64,
        period: f64,
        horizon: f64,
        factors: &Factors,
        ell: usize,
        n_history: usize,
    ) -> Result<Self, ScheduleError> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(ScheduleError::BadPeriod(period));
        }
        let n_history = n_history.max(1);
        let first = -((n_history * (ell + 1)) as i64);
        let span = ((horizon - start) / period).ceil().max(0.0) as i64;
        let last = span + ell as i64 + 2;
        let theta = (first..=last).map(|k| start + k as f64 * period).collect();
        Self::new(theta, factors, ell, n_history)
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn n_history(&self) -> usize {
        self.n_history
    }

    /// Number of residue classes, ℓ + 1.
    pub fn period(&self) -> usize {
        self.ell + 1
    }

    /// Index of the first stored time, −n(ℓ+1).
    pub fn first_index(&self) -> i64 {
        -((self.n_history * (self.ell + 1)) as i64)
    }

    /// K_max.
    pub fn last_index(&self) -> i64 {
        self.first_index() + self.theta.len() as i64 - 1
    }

    pub fn theta0(&self) -> f64 {
        self.theta[self.offset()]
    }

    pub fn theta_first(&self) -> f64 {
        self.theta[0]
    }

    pub fn theta_last(&self) -> f64 {
        self.theta[self.theta.len() - 1]
    }

    fn offset(&self) -> usize {
        self.n_history * (self.ell + 1)
    }

    pub fn theta(&self, k: i64) -> Option<f64> {
        let pos = k - self.first_index();
        if pos < 0 {
            return None;
        }
        self.theta.get(pos as usize).copied()
    }

    pub fn theta_checked(&self, k: i64) -> Result<f64, ScheduleError> {
        self.theta(k).ok_or(ScheduleError::TooShort { needed: k })
    }

    pub fn lambda(&self, k: i64) -> Option<f64> {
        if k < 0 {
            return None;
        }
        self.lambda.get(k as usize).copied()
    }

    pub fn lambda_checked(&self, k: i64) -> Result<f64, ScheduleError> {
        self.lambda(k).ok_or(ScheduleError::TooShort { needed: k })
    }

    /// All stored times, starting at θ_{−n(ℓ+1)}.
    pub fn times(&self) -> &[f64] {
        &self.theta
    }

    /// Factors λ_0, …, λ_{K_max}.
    pub fn factors(&self) -> &[f64] {
        &self.lambda
    }

    /// Index k with θ_k ≤ t < θ_{k+1}, if t lies inside the stored range.
    pub fn interval_index(&self, t: f64) -> Option<i64> {
        // written negated so that NaN is rejected too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(t >= self.theta[0]) || t >= self.theta_last() {
            return None;
        }
        let pos = self.theta.partition_point(|&th| th <= t) - 1;
        Some(pos as i64 + self.first_index())
    }

    /// Residue class and block number of the interval containing t: t lies in
    /// `[θ_{m(ℓ+1)+i}, θ_{m(ℓ+1)+i+1})` with residue `i` and block `m`.
    pub fn residue_block(&self, t: f64) -> Option<(usize, i64)> {
        self.interval_index(t).map(|k| self.split_index(k))
    }

    /// Splits k into (residue, block) with k = block·(ℓ+1) + residue.
    pub fn split_index(&self, k: i64) -> (usize, i64) {
        let p = self.period() as i64;
        (k.rem_euclid(p) as usize, k.div_euclid(p))
    }

    pub fn index_of(&self, residue: usize, block: i64) -> i64 {
        block * self.period() as i64 + residue as i64
    }

    /// Impulse indices k ≥ 0 with θ_k in `[from, to]`.
    pub fn impulses_between(&self, from: f64, to: f64) -> impl Iterator<Item = i64> + '_ {
        (0..=self.last_index()).filter(move |&k| {
            let th = self.theta[(k - self.first_index()) as usize];
            th >= from && th <= to
        })
    }

    /// True when some λ_k with θ_k ≤ `horizon` is negative.
    pub fn has_negative_factor(&self, horizon: f64) -> bool {
        self.impulses_between(f64::NEG_INFINITY, horizon)
            .any(|k| self.lambda[k as usize] < 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integer_schedule(ell: usize, n: usize, lambda: Vec<f64>) -> ImpulseSchedule {
        ImpulseSchedule::uniform(0.0, 1.0, 10.0, &Factors::Cyclic(lambda), ell, n).unwrap()
    }

    #[test]
    fn index_range_covers_history_blocks() {
        let s = integer_schedule(2, 1, vec![1.0]);
        assert_eq!(s.first_index(), -3);
        assert_eq!(s.theta(-3), Some(-3.0));
        assert_eq!(s.theta0(), 0.0);
        assert!(s.theta_last() > 10.0);
        assert_eq!(s.lambda(-1), None);
        let s = integer_schedule(1, 2, vec![1.0]);
        assert_eq!(s.first_index(), -4);
        assert_eq!(s.theta_first(), -4.0);
    }

    #[test]
    fn cyclic_factors_follow_residue() {
        let s = integer_schedule(1, 1, vec![2.0, 3.0]);
        assert_eq!(s.lambda(0), Some(2.0));
        assert_eq!(s.lambda(1), Some(3.0));
        assert_eq!(s.lambda(6), Some(2.0));
    }

    #[test]
    fn residue_blocks() {
        let s = integer_schedule(1, 1, vec![1.0]);
        assert_eq!(s.residue_block(2.5), Some((0, 1)));
        assert_eq!(s.residue_block(3.0), Some((1, 1)));
        assert_eq!(s.residue_block(-0.5), Some((1, -1)));
        assert_eq!(s.residue_block(-2.0), Some((0, -1)));
        assert_eq!(s.residue_block(-2.5), None);
    }

    #[test]
    fn rejects_bad_input() {
        let err = ImpulseSchedule::new(vec![-1.0, 0.0, 0.0, 1.0], &Factors::Cyclic(vec![1.0]), 0, 1);
        assert_eq!(err, Err(ScheduleError::NotIncreasing { k: 0 }));
        let err = ImpulseSchedule::new(vec![-1.0, 0.0, 1.0, 2.0], &Factors::Cyclic(vec![1.0, 0.0]), 0, 1);
        assert_eq!(err, Err(ScheduleError::ZeroFactor { k: 1 }));
        let err = ImpulseSchedule::new(vec![-1.0, 0.0, 1.0, 2.0], &Factors::Explicit(vec![1.0]), 0, 1);
        assert_eq!(err, Err(ScheduleError::MissingFactor { k: 1 }));
        let err = ImpulseSchedule::new(vec![0.0, 1.0], &Factors::Cyclic(vec![1.0]), 1, 1);
        assert!(matches!(err, Err(ScheduleError::TooFewTimes { needed: 4, got: 2 })));
    }

    #[test]
    fn negative_factor_detection_respects_horizon() {
        let theta = vec![-1.0, 0.0, 1.0, 2.0, 3.0];
        let s = ImpulseSchedule::new(theta, &Factors::Explicit(vec![1.0, 1.0, 1.0, -1.0]), 0, 1).unwrap();
        assert!(!s.has_negative_factor(2.5));
        assert!(s.has_negative_factor(3.0));
    }
}
