//! Configuration files and subcommands.
//!
//! Exit codes: 0 success, 1 configuration error, 2 assumption violation,
//! 3 solver failure. `RIDE_THREADS` caps the worker pool.

pub mod commands;
pub mod config;
pub mod csv;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{check, example1, load_problem, run_analysis, simulate, CliError, Example1, Target};
pub use config::{load_config, parse_config, Problem, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "ride", version, about = "Delay differential equations with retarded impulses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Audit the standing assumptions and write assumptions.json.
    Check {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Solve and write trajectory CSV files.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "impulsive")]
        target: Target,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Oscillation, criteria, stability and equivalence; writes analysis.json.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// θ_k = k, τ(t) = t − n(ℓ+1), cyclic λ, φ ≡ 1: check, simulate all,
    /// analyze and print a summary.
    Example1 {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        ell: usize,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1")]
        lambda: Vec<f64>,
        /// Defaults to 30·n·(ℓ+1), i.e. 30 time units per companion.
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value = "example1_out")]
        out: PathBuf,
    },
}

fn configure_threads() {
    if let Some(n) = std::env::var("RIDE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Executes a parsed command.
pub fn execute(cmd: Command) -> Result<String, CliError> {
    match cmd {
        Command::Check { config, out } => {
            let problem = load_problem(&config)?;
            check(&problem, &out)?;
            Ok(format!("assumptions pass; wrote {}", out.join("assumptions.json").display()))
        }
        Command::Simulate { config, target, out } => {
            let problem = load_problem(&config)?;
            let files = simulate(&problem, target, &out)?;
            Ok(files.iter().map(|p| format!("wrote {}", p.display())).collect::<Vec<_>>().join("\n"))
        }
        Command::Analyze { config, out } => {
            let problem = load_problem(&config)?;
            run_analysis(&problem, &out)?;
            Ok(format!("wrote {}", out.join("analysis.json").display()))
        }
        Command::Example1 { n, ell, p, lambda, horizon, step, out } => {
            let horizon = horizon.unwrap_or(30.0 * (n.max(1) * (ell + 1)) as f64);
            example1(&Example1 { n, ell, p, lambda, horizon, step }, &out)
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match execute(cli.command) {
        Ok(msg) => {
            if !msg.is_empty() {
                println!("{msg}");
            }
            0
        }
        Err(e) => {
            eprintln!("ride: {e}");
            e.exit_code()
        }
    }
}
