use std::f64::consts::PI;

use burgers_lab::solver::{
    cole_hopf_solve, duhamel, hs_interval, l2_interval, solve, trajectory_csv, Grid, GridFunction,
    NoForcing, SolverConfig,
};
use burgers_lab::trig::{FrequencyBasis, TrigPoly};
use proptest::prelude::*;

fn basis() -> FrequencyBasis {
    FrequencyBasis::unit_sqrt2()
}

fn periodic(mu: f64, n: usize, t: f64) -> SolverConfig {
    SolverConfig::new(mu, PI, n, 1e-3, t)
}

fn run(u0: &GridFunction, cfg: &SolverConfig) -> GridFunction {
    solve(u0, &NoForcing, None, cfg).unwrap().final_state().clone()
}

#[test]
fn grid_refinement_against_cole_hopf() {
    let errors: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| {
            let cfg = periodic(0.1, n, 1.0);
            let u0 = GridFunction::from_fn(cfg.grid().unwrap(), f64::sin);
            let exact = cole_hopf_solve(&u0, &cfg).unwrap();
            run(&u0, &cfg).sub(exact.final_state()).sup()
        })
        .collect();
    for w in errors.windows(2) {
        assert!(w[0] >= 4.0 * w[1], "{errors:?}");
    }
}

#[test]
fn h1_difference_is_lipschitz_in_the_data() {
    let cfg = periodic(0.2, 128, 1.0);
    let grid = cfg.grid().unwrap();
    let u0 = GridFunction::from_fn(grid, |x| 0.5 * x.sin() + 0.2 * (2.0 * x).cos());
    let bump = GridFunction::from_fn(grid, |x| (3.0 * x).sin());
    let base = run(&u0, &cfg);
    let diff = |eps: f64| {
        let d0 = hs_interval(&bump.scale(eps), 1, -PI, PI).unwrap();
        let d = hs_interval(&run(&u0.add(&bump.scale(eps)), &cfg).sub(&base), 1, -PI, PI).unwrap();
        (d0, d)
    };
    let (d0, d1) = diff(1e-2);
    let (_, d2) = diff(5e-3);
    assert!(d1 <= 2.0 * d0, "{d1} vs {d0}");
    let q = d2 / d1;
    assert!((q - 0.5).abs() < 0.02, "{q}");
}

#[test]
fn rough_data_is_smoothed() {
    let cfg = periodic(0.1, 256, 0.5);
    let grid = cfg.grid().unwrap();
    // a square wave with a few hundred units of H1 seminorm
    let u0 = GridFunction::from_fn(grid, |x| if x.sin() >= 0.0 { 0.2 } else { -0.2 });
    let ut = run(&u0, &cfg);
    let h1 = |g: &GridFunction| hs_interval(g, 1, -PI, PI).unwrap();
    let l2 = |g: &GridFunction| l2_interval(g, -PI, PI).unwrap();
    assert!(h1(&ut) < 0.2 * h1(&u0), "{} vs {}", h1(&ut), h1(&u0));
    assert!(l2(&ut) <= l2(&u0));
    assert!(ut.sup() <= u0.sup() * (1.0 + 1e-9));
}

#[test]
fn small_localized_data_decays_like_the_heat_kernel() {
    let mu = 1.0;
    let cfg = SolverConfig::new(mu, 40.0, 512, 1e-2, 8.0).with_stride(100);
    let grid = cfg.grid().unwrap();
    let u0 = GridFunction::from_fn(grid, |x| 0.1 * (-2.0 * x * x).exp());
    let traj = solve(&u0, &NoForcing, None, &cfg).unwrap();
    let pick = |t: f64| {
        let i = traj.times.iter().position(|s| (s - t).abs() < 1e-9).unwrap();
        traj.states[i].sup()
    };
    let (t1, t2) = (2.0, 8.0);
    let slope = (pick(t2) / pick(t1)).ln() / (t2 / t1).ln();
    assert!((-0.80..=-0.45).contains(&slope), "{slope}");
}

#[test]
fn weak_forcing_from_rest_matches_duhamel() {
    // u0 = 0 and f = eps sin x: u = K f + O(eps^2) with K f = (1 - e^{-mu t}) / mu sin x
    let mu = 0.5;
    let t = 1.0;
    let cfg = periodic(mu, 64, t);
    let grid = cfg.grid().unwrap();
    let f = TrigPoly::sin(basis(), 1, 0, 1.0);
    let kf = duhamel(&f, &cfg).unwrap();
    let exact = GridFunction::from_fn(grid, |x| (1.0 - (-mu * t).exp()) / mu * x.sin());
    assert!(kf.final_state().sub(&exact).sup() < 1e-6);

    let gap = |eps: f64| {
        let fe = f.scale(eps);
        let u = solve(&GridFunction::zeros(grid), &fe, None, &cfg).unwrap();
        u.final_state().sub(&kf.final_state().scale(eps)).sup()
    };
    let q = gap(0.05) / gap(0.1);
    assert!((q - 0.25).abs() < 0.02, "{q}");
}

#[test]
fn runs_are_bit_identical() {
    let cfg = periodic(0.1, 128, 0.5).with_stride(50);
    let grid = cfg.grid().unwrap();
    let u0 = GridFunction::from_fn(grid, |x| 0.3 * x.cos());
    let f = TrigPoly::cos(basis(), 2, 0, 0.4);
    let a = solve(&u0, &f, None, &cfg).unwrap();
    let b = solve(&u0, &f, None, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(trajectory_csv(&a), trajectory_csv(&b));
}

#[test]
fn grid_function_rejects_wrong_length() {
    assert!(Grid::new(PI, 8).is_err());
    let g = Grid::new(PI, 16).unwrap();
    assert!(GridFunction::new(g, vec![0.0; 15]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sup_norm_never_grows_without_forcing(a in -0.5f64..0.5, b in -0.5f64..0.5, k in 1u32..4) {
        let cfg = periodic(0.1, 64, 0.5).with_stride(100);
        let grid = cfg.grid().unwrap();
        let u0 = GridFunction::from_fn(grid, |x| a * x.sin() + b * (k as f64 * x).cos());
        let traj = solve(&u0, &NoForcing, None, &cfg).unwrap();
        let s0 = u0.sup();
        for s in &traj.states {
            prop_assert!(s.sup() <= s0 * (1.0 + 1e-6) + 1e-15);
        }
    }

    #[test]
    fn mean_is_conserved(a in -0.5f64..0.5, c in -0.3f64..0.3) {
        let cfg = periodic(0.1, 64, 0.5);
        let grid = cfg.grid().unwrap();
        let u0 = GridFunction::from_fn(grid, |x| c + a * x.sin());
        let ut = run(&u0, &cfg);
        prop_assert!((ut.mean() - u0.mean()).abs() < 1e-12);
    }
}
