//! The four subcommands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{analyze, AnalysisError, AnalysisReport, Verdict};
use crate::schedule::Factors;
use crate::solver::{solve_companion, solve_impulsive};
use crate::trajectory::Trajectory;
use crate::warp::{build_warp_grid, check_assumptions, AssumptionReport, CompanionSystem};

use super::config::{
    load_config, AnalysisConfig, EquationConfig, ImpulseConfig, InitialConfig, Problem, RunConfig, SimulateConfig,
    ThetaConfig, AUDIT_SAMPLES,
};
use super::csv::{write_companion, write_impulsive};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Assumption(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn solver_err(e: impl std::fmt::Display) -> CliError {
    CliError::Solver(e.to_string())
}

/// What `simulate` writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Impulsive,
    Companion(usize),
    All,
}

impl std::str::FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "impulsive" => Ok(Target::Impulsive),
            "all" => Ok(Target::All),
            _ => s
                .strip_prefix("companion:")
                .and_then(|i| i.parse().ok())
                .map(Target::Companion)
                .ok_or_else(|| format!("expected impulsive, companion:<i> or all, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverSettings {
    pub step: f64,
    pub horizon: f64,
    pub picard_iters: usize,
    pub rho0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionDocument {
    pub schema_version: &'static str,
    pub config: RunConfig,
    #[serde(flatten)]
    pub report: AssumptionReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisDocument {
    pub schema_version: &'static str,
    pub config: RunConfig,
    pub solver: SolverSettings,
    #[serde(flatten)]
    pub report: AnalysisReport,
}

fn create(out: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
    std::fs::create_dir_all(out).map_err(|e| config_err(format!("{}: {e}", out.display())))?;
    let path = out.join(name);
    let file = File::create(&path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    Ok((path, BufWriter::new(file)))
}

fn write_json(out: &Path, name: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
    let (path, mut w) = create(out, name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(config_err)?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(config_err)?;
    Ok(path)
}

fn settings(problem: &Problem) -> SolverSettings {
    SolverSettings {
        step: problem.solve.step,
        horizon: problem.solve.horizon,
        picard_iters: problem.solve.picard_iters,
        rho0: problem.initial.rho0,
    }
}

pub fn load_problem(config: &Path) -> Result<Problem, CliError> {
    Problem::from_config(load_config(config).map_err(config_err)?).map_err(config_err)
}

fn audit(problem: &Problem) -> Result<AssumptionReport, CliError> {
    let grid = build_warp_grid(&problem.schedule).map_err(config_err)?;
    Ok(check_assumptions(&problem.schedule, &grid, &problem.spec, problem.solve.horizon, AUDIT_SAMPLES))
}

fn violation(report: &AssumptionReport) -> CliError {
    let failed = [
        ("retarded argument", &report.retarded_argument),
        ("nonzero factors", &report.nonzero_factors),
        ("residue preservation", &report.residue_preservation),
    ]
    .into_iter()
    .filter(|(_, c)| !c.pass)
    .map(|(name, c)| match c.witness {
        Some(t) => format!("{name} at t = {t}"),
        None => name.to_string(),
    })
    .collect::<Vec<_>>()
    .join(", ");
    CliError::Assumption(failed)
}

/// Writes `assumptions.json`; fails with an assumption error when the
/// retarded-argument, nonzero-factor or residue-preservation check fails.
pub fn check(problem: &Problem, out: &Path) -> Result<AssumptionReport, CliError> {
    let report = audit(problem)?;
    let doc = AssumptionDocument { schema_version: SCHEMA_VERSION, config: problem.config.clone(), report };
    write_json(out, "assumptions.json", &doc)?;
    if doc.report.pass {
        Ok(doc.report)
    } else {
        Err(violation(&doc.report))
    }
}

fn write_trajectory(out: &Path, name: &str, traj: &Trajectory, impulsive: bool) -> Result<PathBuf, CliError> {
    let (path, mut w) = create(out, name)?;
    if impulsive {
        write_impulsive(traj, &mut w)
    } else {
        write_companion(traj, &mut w)
    }
    .map_err(config_err)?;
    w.flush().map_err(config_err)?;
    Ok(path)
}

/// Solves the requested targets and writes `impulsive.csv` and/or
/// `companion_<i>.csv`.
pub fn simulate(problem: &Problem, target: Target, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let ell = problem.schedule.ell();
    let residues: Vec<usize> = match target {
        Target::Impulsive => Vec::new(),
        Target::Companion(i) if i > ell => {
            return Err(CliError::Config(format!("companion:{i} requested but ell = {ell}")))
        }
        Target::Companion(i) => vec![i],
        Target::All => (0..=ell).collect(),
    };
    let system = if residues.is_empty() {
        None
    } else {
        let report = audit(problem)?;
        if !report.pass {
            return Err(violation(&report));
        }
        Some(CompanionSystem::new(&problem.schedule, &problem.spec, &problem.initial).map_err(config_err)?)
    };
    let want_impulsive = matches!(target, Target::Impulsive | Target::All);

    let (x, ys) = rayon::join(
        || want_impulsive.then(|| solve_impulsive(&problem.spec, &problem.schedule, &problem.initial, &problem.solve)),
        || {
            residues
                .par_iter()
                .map(|&i| solve_companion(system.as_ref().expect("companion system"), i, &problem.solve))
                .collect::<Result<Vec<_>, _>>()
        },
    );
    let mut written = Vec::new();
    if let Some(x) = x {
        written.push(write_trajectory(out, "impulsive.csv", &x.map_err(solver_err)?, true)?);
    }
    for (&i, y) in residues.iter().zip(ys.map_err(solver_err)?) {
        written.push(write_trajectory(out, &format!("companion_{i}.csv"), &y, false)?);
    }
    Ok(written)
}

/// Runs the full analysis and writes `analysis.json`.
pub fn run_analysis(problem: &Problem, out: &Path) -> Result<AnalysisDocument, CliError> {
    let (report, _) =
        analyze(&problem.schedule, &problem.spec, &problem.initial, &problem.solve, &problem.analysis).map_err(
            |e| match e {
                AnalysisError::Assumptions(report) => violation(&report),
                other => solver_err(other),
            },
        )?;
    let doc = AnalysisDocument {
        schema_version: SCHEMA_VERSION,
        config: problem.config.clone(),
        solver: settings(problem),
        report,
    };
    write_json(out, "analysis.json", &doc)?;
    Ok(doc)
}

/// Parameters of the integer-grid family `θ_k = k`, `τ(t) = t − n(ℓ+1)`,
/// `λ_k = λ_{k mod (ℓ+1)}`, φ ≡ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Example1 {
    pub n: usize,
    pub ell: usize,
    pub p: f64,
    pub lambda: Vec<f64>,
    pub horizon: f64,
    pub step: f64,
}

impl Example1 {
    pub fn config(&self) -> Result<RunConfig, CliError> {
        if self.n == 0 {
            return Err(CliError::Config("n must be at least 1".into()));
        }
        let lambda = match self.lambda.len() {
            1 => vec![self.lambda[0]; self.ell + 1],
            len if len == self.ell + 1 => self.lambda.clone(),
            len => return Err(CliError::Config(format!("expected 1 or {} lambda values, got {len}", self.ell + 1))),
        };
        if lambda.iter().any(|&l| l == 0.0 || !l.is_finite()) {
            return Err(CliError::Config("lambda values must be nonzero".into()));
        }
        if !self.p.is_finite() {
            return Err(CliError::Config("p must be finite".into()));
        }
        Ok(RunConfig {
            equation: EquationConfig { p: format!("{:?}", self.p), tau: format!("t - {}", self.n * (self.ell + 1)) },
            impulses: ImpulseConfig {
                theta: ThetaConfig::Uniform { start: 0.0, period: 1.0 },
                lambda: Factors::Cyclic(lambda),
                ell: self.ell,
                n_history: self.n,
            },
            initial: InitialConfig { phi: "1".into() },
            simulate: SimulateConfig { horizon: self.horizon, step: self.step, picard_iters: 2 },
            analysis: AnalysisConfig::default(),
        })
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Oscillatory => "oscillatory",
        Verdict::Nonoscillatory => "nonoscillatory-on-horizon",
        Verdict::Indeterminate => "indeterminate",
    }
}

/// check + simulate all + analyze, then a plain-text summary.
pub fn example1(params: &Example1, out: &Path) -> Result<String, CliError> {
    let problem = Problem::from_config(params.config()?).map_err(config_err)?;
    check(&problem, out)?;
    let files = simulate(&problem, Target::All, out)?;
    let doc = run_analysis(&problem, out)?;
    let r = &doc.report;
    let eq = &r.equivalence;

    let mut s = String::new();
    let mut line = |text: String| {
        s.push_str(&text);
        s.push('\n');
    };
    line(format!(
        "n = {}, ell = {}, p = {}, lambda = {:?}, horizon = {}, step = {}",
        params.n, params.ell, params.p, params.lambda, params.horizon, params.step
    ));
    line("assumptions: pass".into());
    if r.criteria.applicable {
        for c in &r.criteria.rows {
            line(format!(
                "companion {}: y' + {}*y(t - {}) = 0, q*delay = {:.6}, one_over_e = {}, pi_over_two = {}",
                c.residue,
                c.q,
                c.delay,
                c.q * c.delay,
                c.one_over_e,
                c.pi_over_two
            ));
        }
    }
    line(format!(
        "impulsive: {} ({} sign changes on [{}, {}])",
        verdict_name(eq.impulsive.verdict),
        eq.impulsive.count,
        eq.impulsive.window.0,
        eq.impulsive.window.1
    ));
    for v in &eq.verdicts {
        let agree = match v.agree {
            Some(true) => "agree",
            Some(false) => "DISAGREE",
            None => "not compared",
        };
        line(format!(
            "residue {}: impulsive {}, companion {} ({agree})",
            v.residue,
            verdict_name(v.impulsive.verdict),
            verdict_name(v.companion.verdict)
        ));
    }
    if eq.negative_factor.applies {
        line(format!("negative factor: impulsive problem is oscillatory (detected: {})", verdict_name(eq.impulsive.verdict)));
    }
    if eq.mixed_signs.applies {
        line(format!("companions of mixed sign {:?}: impulsive problem is oscillatory", eq.mixed_signs.companion_signs));
    }
    let proj = eq.projection.iter().fold(0.0_f64, |m, p| m.max(p.deviation.relative));
    line(format!(
        "max transform deviation: projection {:.3e}, reconstruction {:.3e} (relative)",
        proj, eq.reconstruction.relative
    ));
    let st = &r.stability;
    line(format!("stability: impulsive stable = {}, asymptotic = {}", st.impulsive.stable, st.impulsive.asymptotic));
    for (i, c) in st.companions.iter().enumerate() {
        line(format!("stability: companion {i} stable = {}, asymptotic = {}", c.stable, c.asymptotic));
    }
    let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    line(format!("wrote {}, {}, {}", out.join("assumptions.json").display(), names.join(", "), out.join("analysis.json").display()));
    Ok(s)
}
