//! Finite-horizon stability probes inside and outside the π/2 region.

use ride::analysis::{probe_stability, ProbeSystem, StabilityOptions};
use ride::{DelaySpec, Factors, ImpulseSchedule, ScalarFn, SolveConfig};

fn main() {
    let horizon = 50.0;
    let sched = ImpulseSchedule::uniform(0.0, 1.0, horizon, &Factors::Cyclic(vec![1.0]), 0, 1).unwrap();
    let cfg = SolveConfig { step: 1e-2, horizon, ..SolveConfig::default() };
    let opts = StabilityOptions { start_times: vec![0.0, 12.5], ..StabilityOptions::default() };
    for p in [0.5, 1.0, 1.5, 2.0] {
        let spec = DelaySpec::new(ScalarFn::constant(p), ScalarFn::parse("t - 1").unwrap());
        let rep = probe_stability(ProbeSystem::Impulsive { spec: &spec, sched: &sched }, &opts, &cfg).unwrap();
        let worst = rep.rows.iter().map(|r| r.growth_ratio).fold(0.0, f64::max);
        println!(
            "p = {p}: stable {}, uniform {}, asymptotic {}; worst growth ratio {worst:.3e}, delta(eps = 1e-2) = {:.3e}",
            rep.stable, rep.uniform, rep.asymptotic, rep.rows[0].delta
        );
    }
}
