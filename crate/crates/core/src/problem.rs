//! Equation data: coefficient, deviating argument and initial function.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{parse_expr, EvalError, Expr, ParseError};
use crate::schedule::ImpulseSchedule;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FnError {
    #[error(transparent)]
    Expr(#[from] EvalError),
    #[error("t = {t} is outside the tabulated range [{start}, {end}]")]
    OutsideTable { t: f64, start: f64, end: f64 },
    #[error("non-finite value at t = {t}")]
    NotFinite { t: f64 },
}

impl FnError {
    pub fn at(&self) -> f64 {
        match self {
            FnError::Expr(EvalError::DivisionByZero { t }) => *t,
            FnError::OutsideTable { t, .. } | FnError::NotFinite { t } => *t,
        }
    }
}

/// Samples `(t_j, v_j)` with linear interpolation between them.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Table {
    /// Returns `None` unless the times are strictly increasing and both
    /// columns have the same non-zero length.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Option<Self> {
        let ok = !times.is_empty()
            && times.len() == values.len()
            && times.windows(2).all(|w| w[1] > w[0]);
        ok.then_some(Self { times, values })
    }

    fn eval(&self, t: f64) -> Result<f64, FnError> {
        let (start, end) = (self.times[0], self.times[self.times.len() - 1]);
        if !(t >= start && t <= end) {
            return Err(FnError::OutsideTable { t, start, end });
        }
        let j = self.times.partition_point(|&s| s <= t);
        if j == self.times.len() {
            return Ok(self.values[j - 1]);
        }
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        let w = (t - t0) / (t1 - t0);
        Ok(self.values[j - 1] + (self.values[j] - self.values[j - 1]) * w)
    }
}

/// A scalar function of time.
#[derive(Clone)]
pub enum ScalarFn {
    Expr(Expr),
    Table(Table),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Expr(e) => write!(f, "Expr({e})"),
            ScalarFn::Table(t) => write!(f, "Table({} samples)", t.times.len()),
            ScalarFn::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl ScalarFn {
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        parse_expr(src).map(ScalarFn::Expr)
    }

    pub fn constant(c: f64) -> Self {
        ScalarFn::Expr(Expr::Number(c))
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFn::Custom(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> Result<f64, FnError> {
        let v = match self {
            ScalarFn::Expr(e) => e.eval(t)?,
            ScalarFn::Table(tab) => tab.eval(t)?,
            ScalarFn::Custom(f) => f(t),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(FnError::NotFinite { t })
        }
    }

    /// The constant value, when the function is an expression free of `t`.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            ScalarFn::Expr(e) if e.is_constant() => e.eval(0.0).ok(),
            _ => None,
        }
    }

    /// The lag `r ≥ 0` when the function is written as `t - r`.
    pub fn as_shift(&self) -> Option<f64> {
        match self {
            ScalarFn::Expr(e) => match e.affine_form()? {
                (a, b) if a == 1.0 && b <= 0.0 => Some(-b),
                _ => None,
            },
            _ => None,
        }
    }
}

/// Coefficient `p` and deviating argument `τ` of `x'(t) + p(t)·x(τ(t)) = 0`.
#[derive(Debug, Clone)]
pub struct DelaySpec {
    pub p: ScalarFn,
    pub tau: ScalarFn,
}

impl DelaySpec {
    pub fn new(p: ScalarFn, tau: ScalarFn) -> Self {
        Self { p, tau }
    }

    /// Parses both functions from expression text.
    pub fn parse(p: &str, tau: &str) -> Result<Self, ParseError> {
        Ok(Self { p: ScalarFn::parse(p)?, tau: ScalarFn::parse(tau)? })
    }
}

/// `y'(t) + q(t)·y(σ(t)) = 0` given by two scalar functions.
#[derive(Debug, Clone)]
pub struct PlainEquation {
    pub q: ScalarFn,
    pub sigma: ScalarFn,
}

/// Initial function φ on `[rho0, θ_0]`.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub phi: ScalarFn,
    pub rho0: f64,
}

impl InitialData {
    /// Uses `rho0 = min(ϱ_{θ_0}, θ_{−n(ℓ+1)})` so that φ also covers every
    /// history block of the schedule.
    pub fn for_problem(
        phi: ScalarFn,
        spec: &DelaySpec,
        sched: &ImpulseSchedule,
        horizon: f64,
        samples: usize,
    ) -> Result<Self, FnError> {
        let rho = compute_rho(&spec.tau, sched.theta0(), horizon, samples)?;
        Ok(Self { phi, rho0: rho.min(sched.theta_first()) })
    }
}

/// `ϱ_{t0} = inf{τ(ξ) : ξ ≥ t0}`, approximated by the minimum of τ over
/// `samples` equally spaced points of `[t0, horizon]`.
pub fn compute_rho(tau: &ScalarFn, t0: f64, horizon: f64, samples: usize) -> Result<f64, FnError> {
    let samples = samples.max(2);
    let span = horizon - t0;
    let mut rho = f64::INFINITY;
    for j in 0..samples {
        let t = if j + 1 == samples { horizon } else { t0 + span * j as f64 / (samples - 1) as f64 };
        rho = rho.min(tau.eval(t)?);
    }
    Ok(rho)
}
