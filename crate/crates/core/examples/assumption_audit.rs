//! Audit the standing hypotheses for a good and a bad delay.

use ride::warp::check_assumptions;
use ride::{build_warp_grid, DelaySpec, Factors, ImpulseSchedule};

fn main() {
    let sched = ImpulseSchedule::uniform(0.0, 1.0, 20.0, &Factors::Cyclic(vec![2.0, 0.5]), 1, 1).unwrap();
    let grid = build_warp_grid(&sched).unwrap();
    for tau in ["t - 2", "t - 1", "t + 0.5"] {
        let spec = DelaySpec::parse("0.5", tau).unwrap();
        let rep = check_assumptions(&sched, &grid, &spec, 20.0, 2000);
        println!("tau = {tau}: pass = {}", rep.pass);
        for (name, c) in [
            ("retarded argument", &rep.retarded_argument),
            ("nonzero factors", &rep.nonzero_factors),
            ("residue preservation", &rep.residue_preservation),
            ("positive factors", &rep.positive_factors),
        ] {
            match (&c.witness, &c.detail) {
                (Some(t), Some(d)) => println!("  {name}: fails at t = {t} ({d})"),
                _ if c.pass => println!("  {name}: ok"),
                _ => println!("  {name}: fails"),
            }
        }
        if rep.pass {
            let b = &rep.inverted_products;
            println!("  sup of inverted factor products {:.3} (still growing: {})", b.sup_all, b.growing);
        }
    }
}
