//! The time warp on an irregular impulse schedule: ϑ grids, α/β round
//! trips and the residue that owns a given time.

use ride::{build_warp_grid, Factors, ImpulseSchedule, Side};

fn main() {
    // ℓ = 2, one history block per residue, uneven gaps
    let times = vec![-1.5, -1.0, -0.2, 0.0, 0.7, 1.0, 2.2, 2.5, 3.1, 4.0, 4.4, 5.9, 6.0, 7.3, 8.0];
    let sched = ImpulseSchedule::new(times, &Factors::Cyclic(vec![1.0, 2.0, 0.5]), 2, 1).unwrap();
    let grid = build_warp_grid(&sched).unwrap();

    for r in grid.residues() {
        let vt: Vec<String> = r.vartheta().iter().map(|v| format!("{v:.2}")).collect();
        println!("residue {}: vartheta = [{}]", r.residue(), vt.join(", "));
    }

    let mut worst = 0.0_f64;
    for (i, r) in grid.residues().iter().enumerate() {
        for m in r.first_block()..=r.last_block() {
            let (s, e) = r.block(m).unwrap();
            let t = 0.5 * (s + e);
            let w = grid.beta(i, t).unwrap();
            worst = worst.max((grid.alpha(i, w).unwrap() - t).abs());
            if m == 1 {
                println!("residue {i}: real block [{s}, {e}) midpoint {t:.3} -> warped {w:.3}");
            }
        }
    }
    println!("max |alpha(beta(t)) - t| over block midpoints: {worst:e}");

    for t in [0.3, 1.5, 2.6, 5.95] {
        println!("t = {t}: owned by residue {:?}", grid.residue_of(t, Side::Right));
    }
}
