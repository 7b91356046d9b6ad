//! JSON run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::AnalysisOptions;
use crate::problem::{DelaySpec, InitialData, ScalarFn};
use crate::schedule::{Factors, ImpulseSchedule};
use crate::solver::SolveConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub equation: EquationConfig,
    pub impulses: ImpulseConfig,
    pub initial: InitialConfig,
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationConfig {
    pub p: String,
    pub tau: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ThetaConfig {
    /// θ_k = start + k·period.
    Uniform { start: f64, period: f64 },
    /// θ_{−n(ℓ+1)}, …, θ_{K_max} in order.
    Explicit { times: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpulseConfig {
    pub theta: ThetaConfig,
    pub lambda: Factors,
    pub ell: usize,
    #[serde(default = "one")]
    pub n_history: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub phi: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub horizon: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_picard")]
    pub picard_iters: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub t_min: Option<f64>,
    pub min_changes: Option<usize>,
    pub floor: Option<f64>,
    pub eps_list: Option<Vec<f64>>,
    pub start_times: Option<Vec<f64>>,
    pub tail_tol: Option<f64>,
}

fn one() -> usize {
    1
}

fn default_step() -> f64 {
    1e-3
}

fn default_picard() -> usize {
    2
}

/// Samples used for ϱ and the assumption audit.
pub const AUDIT_SAMPLES: usize = 2000;

/// A configuration turned into solver objects.
#[derive(Debug, Clone)]
pub struct Problem {
    pub config: RunConfig,
    pub schedule: ImpulseSchedule,
    pub spec: DelaySpec,
    pub initial: InitialData,
    pub solve: SolveConfig,
    pub analysis: AnalysisOptions,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| bad(format!("{}: {}", e.path(), e.inner())))
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

fn parse_fn(field: &str, src: &str) -> Result<ScalarFn, ConfigError> {
    ScalarFn::parse(src).map_err(|e| bad(format!("{field}: {e}")))
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{field}: must be positive, got {v}")))
    }
}

impl Problem {
    pub fn from_config(config: RunConfig) -> Result<Self, ConfigError> {
        let p = parse_fn("equation.p", &config.equation.p)?;
        let tau = parse_fn("equation.tau", &config.equation.tau)?;
        let phi = parse_fn("initial.phi", &config.initial.phi)?;
        let sim = &config.simulate;
        positive("simulate.step", sim.step)?;
        if sim.picard_iters == 0 {
            return Err(bad("simulate.picard_iters: must be at least 1"));
        }
        if config.impulses.n_history == 0 {
            return Err(bad("impulses.n_history: must be at least 1"));
        }
        let imp = &config.impulses;
        let schedule = match &imp.theta {
            ThetaConfig::Uniform { start, period } => {
                positive("impulses.theta.period", *period)?;
                ImpulseSchedule::uniform(*start, *period, sim.horizon, &imp.lambda, imp.ell, imp.n_history)
            }
            ThetaConfig::Explicit { times } => ImpulseSchedule::new(times.clone(), &imp.lambda, imp.ell, imp.n_history),
        }
        .map_err(|e| bad(format!("impulses: {e}")))?;
        if !(sim.horizon > schedule.theta0() && sim.horizon.is_finite()) {
            return Err(bad(format!("simulate.horizon: must exceed θ_0 = {}", schedule.theta0())));
        }
        let spec = DelaySpec::new(p, tau);
        let initial = InitialData::for_problem(phi, &spec, &schedule, sim.horizon, AUDIT_SAMPLES)
            .map_err(|e| bad(format!("equation.tau: {e}")))?;
        let solve = SolveConfig { step: sim.step, horizon: sim.horizon, picard_iters: sim.picard_iters, ..SolveConfig::default() };

        let mut analysis = AnalysisOptions::for_problem(&schedule, &spec, sim.horizon);
        let a = &config.analysis;
        if let Some(t) = a.t_min {
            analysis.oscillation.t_min = t;
        }
        if let Some(m) = a.min_changes {
            if m == 0 {
                return Err(bad("analysis.min_changes: must be at least 1"));
            }
            analysis.oscillation.min_changes = m;
        }
        if let Some(f) = a.floor {
            analysis.oscillation.floor = f;
        }
        if let Some(eps) = &a.eps_list {
            for &e in eps {
                positive("analysis.eps_list", e)?;
            }
            analysis.stability.eps_list = eps.clone();
        }
        if let Some(starts) = &a.start_times {
            for &s in starts {
                if !(s >= schedule.theta0() && s < sim.horizon) {
                    return Err(bad(format!("analysis.start_times: {s} is outside [θ_0, horizon)")));
                }
            }
            analysis.stability.start_times = starts.clone();
        }
        if let Some(t) = a.tail_tol {
            positive("analysis.tail_tol", t)?;
            analysis.stability.tail_tol = t;
        }
        Ok(Self { config, schedule, spec, initial, solve, analysis })
    }
}
