//! Linear delay differential equations with retarded impulse conditions.
//!
//! The equation family is
//!
//! ```text
//! x'(t) + p(t)·x(τ(t)) = 0            for t ≥ θ_0, t ≠ θ_k
//! x(θ_k) = λ_k · x(θ_{k−ℓ}⁻)          for k = 0, 1, 2, ...
//! x(t) = φ(t)                          on [ϱ, θ_0)
//! ```
//!
//! where the jump at θ_k uses the left limit at the earlier impulse time
//! θ_{k−ℓ}. The crate
//!
//! * integrates such problems with a method-of-steps Heun scheme ([`solver`]),
//! * builds the time-warp that splits one impulsive equation into ℓ+1
//!   ordinary delay equations and maps solutions back and forth ([`warp`]),
//! * detects oscillation, evaluates the constant-coefficient criteria and
//!   probes stability numerically ([`analysis`]),
//! * drives all of this from JSON configuration files ([`cli`]).
//!
//! ```
//! use ride::{solve_impulsive, DelaySpec, Factors, ImpulseSchedule, InitialData, ScalarFn, SolveConfig};
//!
//! // ℓ = 0, θ_k = k, λ_k = 0.5, p = 0, φ = 1: x halves at every integer.
//! let sched = ImpulseSchedule::uniform(0.0, 1.0, 3.0, &Factors::Cyclic(vec![0.5]), 0, 1).unwrap();
//! let spec = DelaySpec::parse("0", "t - 1").unwrap();
//! let init = InitialData { phi: ScalarFn::constant(1.0), rho0: -1.0 };
//! let cfg = SolveConfig { horizon: 3.0, ..SolveConfig::default() };
//! let x = solve_impulsive(&spec, &sched, &init, &cfg).unwrap();
//! assert_eq!(x.evaluate(2.5, ride::Side::Right).unwrap(), 0.125);
//! ```

pub mod analysis;
pub mod cli;
pub mod expr;
pub mod problem;
pub mod schedule;
pub mod solver;
pub mod trajectory;
pub mod warp;

pub use expr::{eval_expr, parse_expr, Expr, ParseError};
pub use problem::{compute_rho, DelaySpec, FnError, InitialData, PlainEquation, ScalarFn};
pub use schedule::{Factors, ImpulseSchedule, ScheduleError};
pub use solver::{solve_impulsive, solve_plain, DelayEquation, History, SolveConfig, SolveError};
pub use trajectory::{Side, Trajectory, TrajectoryError};
pub use warp::{build_warp_grid, CompanionSystem, WarpError, WarpGrid};
