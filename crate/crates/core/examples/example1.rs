//! The integer-grid family through the same path as `ride example1`:
//! check, simulate every target, analyze, summarise.
//!
//! cargo run --example example1 -- [n] [ell] [p] [lambda,...]

use ride::cli::{example1, Example1};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n = args.first().map_or(1, |s| s.parse().expect("n"));
    let ell = args.get(1).map_or(2, |s| s.parse().expect("ell"));
    let p = args.get(2).map_or(0.5, |s| s.parse().expect("p"));
    let lambda = args.get(3).map_or(vec![1.0], |s| s.split(',').map(|v| v.parse().expect("lambda")).collect());
    let out = std::env::temp_dir().join("ride_example1");
    let params = Example1 { n, ell, p, lambda, horizon: 30.0 * (n * (ell + 1)) as f64, step: 1e-3 };
    match example1(&params, &out) {
        Ok(summary) => print!("{summary}"),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
