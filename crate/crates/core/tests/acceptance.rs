//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use ride::analysis::{
    detect_oscillation, detect_oscillation_on_residue, probe_stability, verify_equivalence, OscillationOptions,
    ProbeSystem, StabilityOptions, Verdict,
};
use ride::warp::check_assumptions;
use ride::{
    build_warp_grid, solve_impulsive, solve_plain, CompanionSystem, DelaySpec, Factors, ImpulseSchedule, InitialData,
    ScalarFn, Side, SolveConfig,
};

type Outcome = Result<String, String>;

fn run(id: &str, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            pass = false;
            detail = format!("{detail}; over the {:.0} s limit", limit.as_secs_f64());
        }
    }
    println!("{} {id} {title}: {detail} [{:.2} s]", if pass { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    pass
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn example1(n: usize, ell: usize, p: f64, lambda: &[f64], horizon: f64) -> (ImpulseSchedule, DelaySpec, InitialData) {
    let sched = ImpulseSchedule::uniform(0.0, 1.0, horizon, &Factors::Cyclic(lambda.to_vec()), ell, n).unwrap();
    let spec = DelaySpec::new(ScalarFn::constant(p), ScalarFn::parse(&format!("t - {}", n * (ell + 1))).unwrap());
    let init = InitialData { phi: ScalarFn::constant(1.0), rho0: sched.theta_first() };
    (sched, spec, init)
}

fn cfg(step: f64, horizon: f64) -> SolveConfig {
    SolveConfig { step, horizon, ..SolveConfig::default() }
}

// 1. β∘α and α∘β are identities on random schedules.
fn warp_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let ell = rng.random_range(0..4usize);
        let n = rng.random_range(1..3usize);
        let count = n * (ell + 1) + 40;
        let mut t = rng.random_range(-3.0..3.0);
        let times: Vec<f64> = (0..count)
            .map(|_| {
                let now = t;
                t += rng.random_range(0.05..2.0);
                now
            })
            .collect();
        let sched = ImpulseSchedule::new(times, &Factors::Cyclic(vec![1.0]), ell, n).map_err(|e| e.to_string())?;
        let grid = build_warp_grid(&sched).map_err(|e| e.to_string())?;
        for r in grid.residues() {
            let (a, b) = (r.domain_start(), r.domain_end());
            for j in 0..2000 {
                let tw = a + (b - a) * j as f64 / 2000.0;
                let back = r.beta(r.alpha(tw, Side::Right).unwrap(), Side::Right).unwrap();
                worst = worst.max((back - tw).abs());
            }
            for m in r.first_block()..=r.last_block() {
                let (s, e) = r.block(m).unwrap();
                for j in 0..20 {
                    let tr = s + (e - s) * j as f64 / 20.0;
                    let back = r.alpha(r.beta(tr, Side::Right).unwrap(), Side::Right).unwrap();
                    worst = worst.max((back - tr).abs());
                }
            }
        }
    }
    ensure(worst <= 1e-12, || format!("max error {worst:e}"))?;
    Ok(format!("100 schedules, max error {worst:e}"))
}

// 2. Integer impulse times: ϑ, α, σ and q in closed form.
#[allow(clippy::needless_range_loop)]
fn example_closed_forms() -> Outcome {
    let lambdas = [2.0, 3.0, 0.5, 5.0];
    let p = 0.7;
    let mut worst_alpha = 0.0_f64;
    let mut worst_sigma_dense = 0.0_f64;
    let mut worst_q = 0.0_f64;
    let mut dyadic = 0;
    for n in 1..=2usize {
        for ell in 0..=3usize {
            let (sched, spec, init) = example1(n, ell, p, &lambdas[..=ell], 25.0 * (ell + 1) as f64);
            let sys = CompanionSystem::new(&sched, &spec, &init).map_err(|e| e.to_string())?;
            let grid = sys.grid();
            for i in 0..=ell {
                let r = grid.residue(i).unwrap();
                for (pos, &v) in r.vartheta().iter().enumerate() {
                    let k = r.first_block() + pos as i64;
                    ensure(v == k as f64, || format!("n={n} ell={ell} i={i}: vartheta_{k} = {v}"))?;
                }
                for j in 0..=((20 + n) * 100) {
                    let t = -(n as f64) + j as f64 / 100.0;
                    let a = grid.alpha(i, t).map_err(|e| e.to_string())?;
                    worst_alpha = worst_alpha.max((a - (t + i as f64 + t.floor() * ell as f64)).abs());
                }
                // dyadic times: every warp operation is exact
                for j in 0..=(20 * 64) {
                    let t = j as f64 / 64.0;
                    let s = sys.sigma(i, t, Side::Right).map_err(|e| e.to_string())?;
                    ensure(s == t - n as f64, || format!("n={n} ell={ell} i={i}: sigma({t}) = {s}"))?;
                    dyadic += 1;
                }
                let expected_q = p / lambdas[i].powi(n as i32);
                for j in 0..=2000 {
                    let t = 20.0 * j as f64 / 2000.0 + 0.000_123;
                    let s = sys.sigma(i, t, Side::Right).map_err(|e| e.to_string())?;
                    worst_sigma_dense = worst_sigma_dense.max((s - (t - n as f64)).abs());
                    // all n junctions of the window (t − n, t] have j ≥ 0 once t ≥ n − 1
                    if t >= (n - 1) as f64 {
                        let q = sys.q(i, t, Side::Right).map_err(|e| e.to_string())?;
                        worst_q = worst_q.max((q - expected_q).abs() / expected_q);
                    }
                }
            }
        }
    }
    ensure(worst_alpha <= 1e-12, || format!("alpha error {worst_alpha:e}"))?;
    ensure(worst_sigma_dense <= 1e-12, || format!("sigma error {worst_sigma_dense:e}"))?;
    ensure(worst_q <= 1e-12, || format!("q relative error {worst_q:e}"))?;
    Ok(format!(
        "vartheta exact; alpha {worst_alpha:e}; sigma exact on {dyadic} dyadic times, {worst_sigma_dense:e} elsewhere; q {worst_q:e}"
    ))
}

// 3. Direct impulsive solve against reconstructed companions and back.
fn equivalence_matrix() -> Outcome {
    let mut worst_proj = 0.0_f64;
    let mut worst_rec = 0.0_f64;
    let mut cases = 0;
    for ell in 0..=2usize {
        for p in [0.3, 0.8] {
            let ones = vec![1.0; ell + 1];
            let ramp: Vec<f64> = (0..=ell).map(|k| 2.0 + k as f64).collect();
            for lambda in [ones, ramp] {
                let (sched, spec, init) = example1(1, ell, p, &lambda, 20.0);
                let osc = OscillationOptions { t_min: 5.0, min_changes: 5, floor: 0.0 };
                let (rep, _) = verify_equivalence(&sched, &spec, &init, &cfg(1e-3, 20.0), &osc).map_err(|e| e.to_string())?;
                for row in &rep.projection {
                    worst_proj = worst_proj.max(row.deviation.relative);
                }
                worst_rec = worst_rec.max(rep.reconstruction.relative);
                cases += 1;
            }
        }
    }
    ensure(worst_proj <= 1e-3 && worst_rec <= 1e-3, || format!("projection {worst_proj:e}, reconstruction {worst_rec:e}"))?;
    Ok(format!("{cases} configs, relative deviation: projection {worst_proj:e}, reconstruction {worst_rec:e}"))
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(lo) < 0.0) == (f(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// 4. Oscillation above 1/e, none below.
fn oscillation_threshold() -> Outcome {
    // s + p·e^{−s} has a real root iff p ≤ 1/e; its minimum is at s = ln p
    let g = |p: f64| move |s: f64| s + p * (-s).exp();
    let min_05 = g(0.5)(0.5f64.ln());
    ensure(min_05 > 0.0, || "oracle: p = 0.5 should have no real root".into())?;
    let root_03 = bisect(g(0.3), -1.0, 0.0);
    ensure(g(0.3)(root_03).abs() < 1e-12, || "oracle: no real root for p = 0.3".into())?;

    let window = OscillationOptions { t_min: 10.0, min_changes: 10, floor: 0.0 };
    let run = |p: f64| {
        let (sched, spec, init) = example1(1, 0, p, &[1.0], 100.0);
        verify_equivalence(&sched, &spec, &init, &cfg(1e-3, 100.0), &window).map_err(|e| e.to_string())
    };
    let (osc, _) = run(0.5)?;
    let row = &osc.verdicts[0];
    ensure(osc.impulsive.count >= 10, || format!("p = 0.5: only {} sign changes", osc.impulsive.count))?;
    ensure(row.agree == Some(true) && osc.impulsive.verdict == row.companion.verdict, || {
        format!("p = 0.5: impulsive {:?}, companion {:?}", osc.impulsive.verdict, row.companion.verdict)
    })?;
    let (non, _) = run(0.3)?;
    ensure(non.impulsive.count == 0, || format!("p = 0.3: {} sign changes", non.impulsive.count))?;
    ensure(non.verdicts[0].agree == Some(true), || "p = 0.3: verdicts disagree".into())?;
    Ok(format!(
        "p = 0.5: {} changes, {:?} on both sides; p = 0.3: 0 changes (real root {root_03:.6})",
        osc.impulsive.count, osc.impulsive.verdict
    ))
}

fn newton(p: f64, mut s: Complex64) -> Complex64 {
    for _ in 0..100 {
        let f = s + p * (-s).exp();
        let df = 1.0 - p * (-s).exp();
        s -= f / df;
    }
    s
}

// 5. Decay inside the π/2 region, growth outside.
fn stability_threshold() -> Outcome {
    let stable_root = newton(1.0, Complex64::new(-0.3, 1.3));
    ensure((stable_root.re + 0.3181).abs() < 1e-3, || format!("oracle root {stable_root}"))?;
    let unstable_root = newton(2.0, Complex64::new(0.1, 1.7));
    ensure(unstable_root.re > 0.0, || format!("oracle root {unstable_root}"))?;

    let (sched, spec, init) = example1(1, 0, 1.0, &[1.0], 50.0);
    let c = cfg(1e-3, 50.0);
    let opts = StabilityOptions { start_times: vec![0.0, 12.5], ..StabilityOptions::default() };
    let rep = probe_stability(ProbeSystem::Impulsive { spec: &spec, sched: &sched }, &opts, &c).map_err(|e| e.to_string())?;
    ensure(rep.asymptotic, || format!("p = 1: asymptotic surrogate false ({:?})", rep.rows))?;
    let x = solve_impulsive(&spec, &sched, &init, &c).map_err(|e| e.to_string())?;
    let tail = x.evaluate(50.0, Side::Right).unwrap().abs();
    ensure(tail <= 1e-3, || format!("p = 1: |x(50)| = {tail:e}"))?;

    let (sched, spec, init) = example1(1, 0, 2.0, &[1.0], 50.0);
    let x = solve_impulsive(&spec, &sched, &init, &c).map_err(|e| e.to_string())?;
    let (early, late) = (x.sup_abs(0.0, 25.0), x.sup_abs(25.0, 50.0));
    ensure(late >= 2.0 * early, || format!("p = 2: sup late {late:e} vs early {early:e}"))?;
    Ok(format!(
        "roots {:.4}{:+.4}i / {:.4}{:+.4}i; p = 1: |x(50)| = {tail:.2e}; p = 2: growth {:.2e}",
        stable_root.re,
        stable_root.im,
        unstable_root.re,
        unstable_root.im,
        late / early
    ))
}

// 6. Negative factors force oscillation, with sign changes at the impulses.
fn negative_factors() -> Outcome {
    let cases: [(usize, f64, &[f64]); 6] = [
        (0, 0.3, &[-1.0]),
        (0, 0.0, &[-0.5]),
        (0, 0.8, &[1.0, -2.0]),
        (1, 0.4, &[-1.0, 2.0]),
        (1, 0.0, &[-1.0, 1.0]),
        (2, 0.5, &[1.0, -2.0, 1.0]),
    ];
    let mut checked = 0;
    for (ell, p, lambda) in cases {
        let horizon = 30.0 * (ell + 1) as f64;
        let (sched, spec, init) = example1(1, ell, p, lambda, horizon);
        let osc = OscillationOptions { t_min: 5.0 * (ell + 1) as f64, min_changes: 5, floor: 0.0 };
        let (rep, sol) = verify_equivalence(&sched, &spec, &init, &cfg(1e-3, horizon), &osc).map_err(|e| e.to_string())?;
        let tag = format!("ell={ell} p={p} lambda={lambda:?}");
        ensure(rep.negative_factor.applies && rep.expected_impulsive == Some(Verdict::Oscillatory), || {
            format!("{tag}: rule not applied")
        })?;
        ensure(rep.impulsive.verdict == Verdict::Oscillatory, || format!("{tag}: detected {:?}", rep.impulsive.verdict))?;
        for k in sched.impulses_between(osc.t_min, horizon) {
            if sched.lambda(k).unwrap() > 0.0 {
                continue;
            }
            let th = sched.theta(k).unwrap();
            let i = (k as usize) % (ell + 1);
            let xi = if ell == 0 {
                detect_oscillation(&sol.impulsive, &osc).xi
            } else {
                detect_oscillation_on_residue(&sol.impulsive, &sched, i, &osc).xi
            };
            ensure(xi.iter().any(|&t| (t - th).abs() < 1e-9), || format!("{tag}: impulse time {th} not among xi"))?;
            checked += 1;
        }
    }
    Ok(format!("{} configs oscillatory; {checked} negative-factor impulse times found in xi", cases.len()))
}

fn unit_delay_error(step: f64, at: f64, exact: f64) -> Result<f64, String> {
    let one = ScalarFn::constant(1.0);
    let sig = ScalarFn::parse("t - 1").unwrap();
    let y = solve_plain(&one, &sig, &one, -1.0, 0.0, &cfg(step, at)).map_err(|e| e.to_string())?;
    Ok((y.evaluate(at, Side::Right).unwrap() - exact).abs())
}

// 7. Error ratio under step halving for y' + y(t − 1) = 0, φ ≡ 1.
fn solver_order() -> Outcome {
    // y = 1 − t on [0, 1], t²/2 − 2t + 3/2 on [1, 2]
    let exact = |t: f64| if t <= 1.0 { 1.0 - t } else { t * t / 2.0 - 2.0 * t + 1.5 };
    let (e1, e2) = (unit_delay_error(1e-2, 2.0, exact(2.0))?, unit_delay_error(5e-3, 2.0, exact(2.0))?);
    let ratio = e1 / e2;
    let detail = format!("|err(2)|: {e1:e} -> {e2:e}, ratio {ratio}");
    ensure(ratio >= 3.5, || detail.clone())?;
    Ok(detail)
}

// 7b. Same ratio at t = 3, where the solution is cubic and the scheme is not
// exact.
fn solver_order_cubic() -> Outcome {
    // y(3) = −1/2 − ∫_1^2 (u²/2 − 2u + 3/2) du = −1/6
    let exact = -1.0 / 6.0;
    let (e1, e2) = (unit_delay_error(1e-2, 3.0, exact)?, unit_delay_error(5e-3, 3.0, exact)?);
    let ratio = e1 / e2;
    let detail = format!("|err(3)|: {e1:.3e} -> {e2:.3e}, ratio {ratio:.3}");
    ensure(ratio >= 3.5, || detail.clone())?;
    Ok(detail)
}

// 8. Residue preservation audit.
fn assumption_audit() -> Outcome {
    let sched = ImpulseSchedule::uniform(0.0, 1.0, 20.0, &Factors::Cyclic(vec![1.0]), 1, 1).unwrap();
    let grid = build_warp_grid(&sched).map_err(|e| e.to_string())?;
    let bad = DelaySpec::parse("0.5", "t - 1").unwrap();
    let rep = check_assumptions(&sched, &grid, &bad, 20.0, 2000);
    ensure(!rep.pass && !rep.residue_preservation.pass, || "tau = t - 1 accepted".into())?;
    let witness = rep.residue_preservation.witness.ok_or("no witness reported")?;
    let good = DelaySpec::parse("0.5", "t - 2").unwrap();
    let ok = check_assumptions(&sched, &grid, &good, 20.0, 2000);
    ensure(ok.pass, || format!("tau = t - 2 rejected: {:?}", ok.residue_preservation))?;
    Ok(format!("tau = t - 1 rejected at t = {witness}; tau = t - 2 passes"))
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let results = [
        run("1", "warp round-trip", Some(s(5)), warp_round_trip),
        run("2", "integer-grid closed forms", None, example_closed_forms),
        run("3", "impulsive/companion equivalence", Some(s(30)), equivalence_matrix),
        run("4", "oscillation threshold", Some(s(10)), oscillation_threshold),
        run("5", "stability threshold", Some(s(10)), stability_threshold),
        run("6", "negative factors", None, negative_factors),
        run("7", "solver order at t = 2", None, solver_order),
        run("7b", "solver order at t = 3", None, solver_order_cubic),
        run("8", "assumption audit", None, assumption_audit),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
