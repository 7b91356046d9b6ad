//! Parsing and evaluating coefficient and delay expressions.

use ride::{parse_expr, ScalarFn};

fn main() {
    for src in ["2 + 3*4", "-t*t", "0.5 * (1 + sin(t))", "t - 1 - 0.25*floor(t)", "exp(-t) / (1 + abs(cos(pi*t)))"] {
        let e = parse_expr(src).expect("valid expression");
        let values: Vec<String> = [0.0, 0.5, 2.0].iter().map(|&t| format!("{:.6}", e.eval(t).unwrap())).collect();
        println!("{src:<36} -> {e:<48} at t = 0, 0.5, 2: {}", values.join(", "));
    }

    // constant and pure-shift forms are recognised; the criteria need them
    let p = ScalarFn::parse("0.3 + 0.1").unwrap();
    let tau = ScalarFn::parse("t - 3").unwrap();
    println!("p constant: {:?}, tau shift: {:?}", p.as_constant(), tau.as_shift());

    for bad in ["2 +", "t ^ 2", "sqrt(t)", "1 / (t - 1)"] {
        match parse_expr(bad) {
            Err(e) => println!("{bad:<12} parse error: {e}"),
            Ok(e) => println!("{bad:<12} parses, but at t = 1: {}", e.eval(1.0).unwrap_err()),
        }
    }
}
