use proptest::prelude::*;

use ride::analysis::{detect_oscillation, probe_stability, OscillationOptions, ProbeSystem, StabilityOptions};
use ride::expr::{BinOp, Constant, Func};
use ride::warp::{project, reconstruct};
use ride::{
    build_warp_grid, compute_rho, parse_expr, solve_impulsive, CompanionSystem, DelaySpec, Expr, Factors,
    ImpulseSchedule, InitialData, ScalarFn, Side, SolveConfig,
};

fn expr_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..1000, 0u32..4).prop_map(|(m, e)| Expr::Number(m as f64 / 10f64.powi(e as i32))),
        Just(Expr::Var),
        Just(Expr::Const(Constant::Pi)),
        Just(Expr::Const(Constant::E)),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div)];
        let func = prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Exp), Just(Func::Abs), Just(Func::Floor)];
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (op, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::Binary(op, Box::new(a), Box::new(b))),
            (func, inner).prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
        ]
    })
}

/// Random increasing times with `n(ℓ+1)` history points before θ_0.
fn schedule() -> impl Strategy<Value = ImpulseSchedule> {
    (0usize..4, 1usize..3, -2.0f64..2.0, prop::collection::vec(0.05f64..2.0, 60)).prop_map(|(ell, n, t0, gaps)| {
        let mut t = t0;
        let times = gaps
            .iter()
            .map(|g| {
                let now = t;
                t += g;
                now
            })
            .collect();
        ImpulseSchedule::new(times, &Factors::Cyclic(vec![1.0]), ell, n).unwrap()
    })
}

/// Uniform schedule, shift delay m(ℓ+1)·period, so every residue is preserved.
#[derive(Debug, Clone)]
struct Case {
    ell: usize,
    period: f64,
    m: usize,
    p: f64,
    lambda: Vec<f64>,
    horizon: f64,
}

impl Case {
    fn build(&self, phi: ScalarFn) -> (ImpulseSchedule, DelaySpec, InitialData, SolveConfig) {
        let sched =
            ImpulseSchedule::uniform(0.0, self.period, self.horizon, &Factors::Cyclic(self.lambda.clone()), self.ell, self.m)
                .unwrap();
        let delay = (self.m * (self.ell + 1)) as f64 * self.period;
        let spec = DelaySpec::new(ScalarFn::constant(self.p), ScalarFn::parse(&format!("t - {delay}")).unwrap());
        let init = InitialData { phi, rho0: sched.theta_first() };
        let cfg = SolveConfig { step: 1e-2, horizon: self.horizon, ..SolveConfig::default() };
        (sched, spec, init, cfg)
    }
}

fn case(positive: bool) -> impl Strategy<Value = Case> {
    let factor = if positive { (0.25f64..4.0).boxed() } else { prop_oneof![-4.0f64..-0.25, 0.25f64..4.0].boxed() };
    (0usize..3, prop_oneof![Just(0.5), Just(1.0), Just(2.0)], 1usize..3, -0.5f64..1.5)
        .prop_flat_map(move |(ell, period, m, p)| {
            prop::collection::vec(factor.clone(), ell + 1).prop_map(move |lambda| Case {
                ell,
                period,
                m,
                p,
                lambda,
                horizon: 12.0,
            })
        })
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printing_and_reparsing_keeps_the_tree(e in expr_tree()) {
        let once = parse_expr(&e.to_string()).unwrap();
        prop_assert_eq!(&once, &e);
        prop_assert_eq!(parse_expr(&once.to_string()).unwrap(), once);
    }

    #[test]
    fn alpha_and_beta_are_inverse(sched in schedule(), frac in 0.0f64..1.0) {
        let grid = build_warp_grid(&sched).unwrap();
        for r in grid.residues() {
            let tw = r.domain_start() + frac * (r.domain_end() - r.domain_start());
            let back = r.beta(r.alpha(tw, Side::Right).unwrap(), Side::Right).unwrap();
            prop_assert!((back - tw).abs() <= 1e-12, "{back} vs {tw}");
            for m in r.first_block()..=r.last_block() {
                let (s, e) = r.block(m).unwrap();
                let tr = s + frac * (e - s);
                let back = r.alpha(r.beta(tr, Side::Right).unwrap(), Side::Right).unwrap();
                prop_assert!((back - tr).abs() <= 1e-12, "{back} vs {tr}");
            }
        }
    }

    #[test]
    fn alpha_maps_warped_blocks_onto_residue_blocks(sched in schedule()) {
        let grid = build_warp_grid(&sched).unwrap();
        let ell = sched.ell() as i64;
        let mut compared = 0;
        for (i, r) in grid.residues().iter().enumerate() {
            for m in (r.first_block() + 1)..=r.last_block() {
                let (Some(a), Some(b)) = (r.vartheta_at(m - 1), r.vartheta_at(m)) else { continue };
                let k = (m - 1) * (ell + 1) + i as i64;
                let (Some(s), Some(e)) = (sched.theta(k), sched.theta(k + 1)) else { continue };
                prop_assert!((r.alpha(a, Side::Right).unwrap() - s).abs() <= 1e-12);
                prop_assert!((r.alpha(b, Side::Left).unwrap() - e).abs() <= 1e-12);
                compared += 1;
            }
        }
        prop_assert!(compared > 10);
    }

    #[test]
    fn at_most_one_residue_owns_each_time(sched in schedule(), frac in 0.0f64..1.0) {
        let grid = build_warp_grid(&sched).unwrap();
        let t = sched.theta0() + frac * (sched.theta_last() - sched.theta0());
        let owners = (0..grid.residue_count()).filter(|&i| grid.chi(i, t)).count();
        prop_assert_eq!(owners, 1);
    }

    #[test]
    fn rho_never_exceeds_tau_at_start(c in -3.0f64..3.0, d in 0.0f64..2.0, t0 in -2.0f64..2.0) {
        let tau = ScalarFn::parse(&format!("t - {d} + {c} * sin(t)")).unwrap();
        let rho = compute_rho(&tau, t0, t0 + 10.0, 500).unwrap();
        prop_assert!(rho <= tau.eval(t0).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn impulse_rule_and_grid_alignment(c in case(false)) {
        let (sched, spec, init, cfg) = c.build(ScalarFn::parse("1 + 0.5 * sin(t)").unwrap());
        let x = solve_impulsive(&spec, &sched, &init, &cfg).unwrap();
        for k in sched.impulses_between(sched.theta0(), cfg.horizon) {
            let th = sched.theta(k).unwrap();
            let hits = x.grid().iter().filter(|&&g| g == th).count();
            prop_assert_eq!(hits, 1, "theta_{} = {} appears {} times", k, th, hits);
            let src = sched.theta(k - c.ell as i64).unwrap();
            let expected = sched.lambda(k).unwrap() * x.evaluate(src, Side::Left).unwrap();
            prop_assert!((x.evaluate(th, Side::Right).unwrap() - expected).abs() <= 1e-9);
        }
        for (j, &t) in x.grid().iter().enumerate() {
            prop_assert_eq!(x.evaluate(t, Side::Right).unwrap().to_bits(), x.values_right()[j].to_bits());
        }
    }

    #[test]
    fn doubling_phi_doubles_the_solution(c in case(false)) {
        let (sched, spec, init, cfg) = c.build(ScalarFn::parse("cos(t)").unwrap());
        let x = solve_impulsive(&spec, &sched, &init, &cfg).unwrap();
        let (_, _, init2, _) = c.build(ScalarFn::parse("2 * cos(t)").unwrap());
        let x2 = solve_impulsive(&spec, &sched, &init2, &cfg).unwrap();
        prop_assert_eq!(x.grid(), x2.grid());
        for (a, b) in x.values_right().iter().zip(x2.values_right()) {
            prop_assert_eq!(2.0 * a, *b);
        }
        for (a, b) in x.values_left().iter().zip(x2.values_left()) {
            prop_assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn positive_scaling_keeps_sign_changes(c in case(false), scale in 0.01f64..100.0) {
        let (sched, spec, init, cfg) = c.build(ScalarFn::parse("1 + 0.5 * sin(3 * t)").unwrap());
        let x = solve_impulsive(&spec, &sched, &init, &cfg).unwrap();
        let opts = OscillationOptions { t_min: 2.0, min_changes: 5, floor: 0.0 };
        let a = detect_oscillation(&x, &opts);
        let b = detect_oscillation(&x.scaled(scale), &opts);
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.count, b.count);
        prop_assert!(sup_diff(&a.xi, &b.xi) <= 1e-9, "{:?} vs {:?}", a.xi, b.xi);
    }

    #[test]
    fn reconstruct_inverts_project(c in case(true)) {
        let (sched, spec, init, cfg) = c.build(ScalarFn::constant(1.0));
        let x = solve_impulsive(&spec, &sched, &init, &cfg).unwrap();
        let grid = build_warp_grid(&sched).unwrap();
        let ys = (0..=c.ell).map(|i| project(&sched, &grid, &x, i)).collect::<Result<Vec<_>, _>>().unwrap();
        let back = reconstruct(&sched, &grid, &ys).unwrap();
        let scale = x.sup_abs(x.start(), x.end()).max(1.0);
        for (j, &t) in back.grid().iter().enumerate() {
            if t < sched.theta0() {
                continue;
            }
            let err = (back.values_right()[j] - x.evaluate(t, Side::Right).unwrap()).abs();
            prop_assert!(err <= 1e-9 * scale, "t = {}: {}", t, err);
        }
    }

    #[test]
    fn companion_solve_tracks_projection(c in case(true)) {
        let (sched, spec, init, cfg) = c.build(ScalarFn::constant(1.0));
        let sys = CompanionSystem::new(&sched, &spec, &init).unwrap();
        let x = solve_impulsive(&spec, &sched, &init, &cfg).unwrap();
        let y = project(&sched, sys.grid(), &x, 0).unwrap();
        let z = ride::solver::solve_companion(&sys, 0, &cfg).unwrap();
        let end = y.end().min(z.end());
        let scale = z.sup_abs(z.start(), end).max(1e-300);
        for &t in z.grid().iter().filter(|&&t| t >= 0.0 && t <= end) {
            let d = (y.evaluate(t, Side::Right).unwrap() - z.evaluate(t, Side::Right).unwrap()).abs();
            prop_assert!(d <= 1e-3 * scale, "t = {}: {} (scale {})", t, d, scale);
        }
    }

    #[test]
    fn delta_is_proportional_to_eps(p in 0.0f64..1.5, eps in 1e-4f64..1.0, factor in 1.5f64..50.0) {
        let sched = ImpulseSchedule::uniform(0.0, 1.0, 10.0, &Factors::Cyclic(vec![1.0]), 0, 1).unwrap();
        let spec = DelaySpec::new(ScalarFn::constant(p), ScalarFn::parse("t - 1").unwrap());
        let cfg = SolveConfig { step: 1e-2, horizon: 10.0, ..SolveConfig::default() };
        let opts = StabilityOptions { start_times: vec![0.0], eps_list: vec![eps, eps * factor], samples: 100, ..StabilityOptions::default() };
        let rep = probe_stability(ProbeSystem::Impulsive { spec: &spec, sched: &sched }, &opts, &cfg).unwrap();
        let (a, b) = (&rep.rows[0], &rep.rows[1]);
        prop_assert!((b.delta / a.delta - factor).abs() <= 1e-12 * factor);
    }
}
