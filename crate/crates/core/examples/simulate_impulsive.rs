//! Solve one impulsive problem and write it as CSV to stdout.

use ride::cli::csv::write_impulsive;
use ride::{solve_impulsive, DelaySpec, Factors, ImpulseSchedule, InitialData, ScalarFn, Side, SolveConfig};

fn main() {
    // x'(t) + 0.6·x(t − 2) = 0, jumps x(k) = λ_k·x((k − 1)⁻) with λ = (1.5, 0.5)
    let horizon = 12.0;
    let sched = ImpulseSchedule::uniform(0.0, 1.0, horizon, &Factors::Cyclic(vec![1.5, 0.5]), 1, 1).unwrap();
    let spec = DelaySpec::parse("0.6", "t - 2").unwrap();
    let init = InitialData { phi: ScalarFn::parse("1 + 0.5*sin(t)").unwrap(), rho0: sched.theta_first() };
    let cfg = SolveConfig { step: 0.05, horizon, ..SolveConfig::default() };
    let x = solve_impulsive(&spec, &sched, &init, &cfg).unwrap();

    for k in 0..6 {
        let t = k as f64;
        println!(
            "# t = {t}: x(t-) = {:+.6}, x(t) = {:+.6}",
            x.evaluate(t, Side::Left).unwrap(),
            x.evaluate(t, Side::Right).unwrap()
        );
    }
    write_impulsive(&x, std::io::stdout().lock()).unwrap();
}
