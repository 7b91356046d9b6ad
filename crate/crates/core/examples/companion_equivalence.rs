//! Split an impulsive problem into its companion equations, solve both
//! sides independently and compare.

use ride::analysis::{verify_equivalence, OscillationOptions};
use ride::{DelaySpec, Factors, ImpulseSchedule, InitialData, ScalarFn, Side, SolveConfig};

fn main() {
    let horizon = 60.0;
    let sched = ImpulseSchedule::uniform(0.0, 1.0, horizon, &Factors::Cyclic(vec![2.0, 3.0, 0.5]), 2, 1).unwrap();
    let spec = DelaySpec::parse("0.7", "t - 3").unwrap();
    let init = InitialData { phi: ScalarFn::constant(1.0), rho0: sched.theta_first() };
    let cfg = SolveConfig { step: 1e-3, horizon, ..SolveConfig::default() };
    let osc = OscillationOptions { t_min: 15.0, min_changes: 5, floor: 0.0 };

    let (report, sol) = verify_equivalence(&sched, &spec, &init, &cfg, &osc).unwrap();
    for (i, row) in report.projection.iter().enumerate() {
        let sys = &sol.system;
        println!(
            "companion {i}: q(5) = {:.6}, sigma(5) = {:.3}, |project(x) - y| / sup|y| = {:.2e}",
            sys.q(i, 5.0, Side::Right).unwrap(),
            sys.sigma(i, 5.0, Side::Right).unwrap(),
            row.deviation.relative
        );
    }
    println!("|reconstruct(y) - x| / sup|x| = {:.2e}", report.reconstruction.relative);
    for v in &report.verdicts {
        println!("residue {}: impulsive {:?}, companion {:?}", v.residue, v.impulsive.verdict, v.companion.verdict);
    }
}
