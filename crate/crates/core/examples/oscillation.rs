//! Oscillation on both sides of the 1/e threshold, and forced oscillation
//! from a negative impulse factor.

use ride::analysis::{criterion_one_over_e, detect_oscillation, OscillationOptions};
use ride::{solve_impulsive, DelaySpec, Factors, ImpulseSchedule, InitialData, ScalarFn, SolveConfig};

fn run(p: f64, lambda: f64) {
    let horizon = 60.0;
    let sched = ImpulseSchedule::uniform(0.0, 1.0, horizon, &Factors::Cyclic(vec![lambda]), 0, 1).unwrap();
    let spec = DelaySpec::new(ScalarFn::constant(p), ScalarFn::parse("t - 1").unwrap());
    let init = InitialData { phi: ScalarFn::constant(1.0), rho0: -1.0 };
    let x = solve_impulsive(&spec, &sched, &init, &SolveConfig { horizon, ..SolveConfig::default() }).unwrap();
    let osc = detect_oscillation(&x, &OscillationOptions { t_min: 5.0, min_changes: 5, floor: 0.0 });
    let first: Vec<String> = osc.xi.iter().take(4).map(|t| format!("{t:.3}")).collect();
    println!(
        "p = {p}, lambda = {lambda}: q*delay > 1/e is {}; {:?} with {} sign changes, first at [{}]",
        criterion_one_over_e(p / lambda, 1.0),
        osc.verdict,
        osc.count,
        first.join(", ")
    );
}

fn main() {
    run(0.5, 1.0);
    run(0.3, 1.0);
    run(0.3, -1.0);
}
