//! The experiment kinds other than sweeps.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::checks::{apriori_checks, check_targets, CheckReport};
use super::rng::CounterRng;
use super::spec::{LatticeReportSpec, LocalityStudy, RelaxStudy, SimulateSpec, SteerStudy};
use super::{HarnessError, StudyOutput, Table};
use crate::control::{
    absorb_zeta, averaged_forcing, default_theta, relax_level, steer, ControlSchedule, Schedule,
    SteeringResult,
};
use crate::smooth::smoothstep;
use crate::solver::{
    cole_hopf_solve, hs_interval, l2_interval, solve, trajectory_csv, Forcing, GridFunction,
    GridTrajectory, NoForcing, SolverConfig, SumForcing,
};
use crate::trig::{
    convexification_span, enumerate_lattice, make_control_space, saturation_decompose, FrequencyDomain,
    standard_generators, TrigPoly,
};

fn forcing_schedule(spec: &SimulateSpec) -> Option<ControlSchedule> {
    let f = spec.f.clone()?;
    let t = spec.solver.t_final;
    Some(match spec.f_until {
        Some(u) if u > 0.0 && u < t => {
            let zero = TrigPoly::zero(*f.basis());
            Schedule::piecewise_constant(&[0.0, u, t], vec![f, zero]).expect("0 < u < T")
        }
        Some(u) if u <= 0.0 => Schedule::constant(t, TrigPoly::zero(*f.basis())),
        _ => Schedule::constant(t, f),
    })
}

/// Runs the solver, the a priori bounds and optionally the Cole-Hopf comparison.
pub fn simulate(spec: &SimulateSpec) -> Result<StudyOutput, HarnessError> {
    let cfg = &spec.solver;
    let grid = cfg.grid()?;
    let u0 = GridFunction::from_trig(grid, &spec.u0);
    let f = forcing_schedule(spec);
    let f: &dyn Forcing = match &f {
        Some(s) => s,
        None => &NoForcing,
    };
    let g = spec.g.as_ref().map(|g| g as &dyn Forcing);
    let traj = solve(&u0, f, g, cfg)?;
    let mut checks = apriori_checks(&traj, f, g, cfg, &spec.tolerances.apriori)?;
    let mut data = json!({
        "t_final": traj.final_time(),
        "steps": traj.steps.len() - 1,
        "sup_final": traj.final_state().sup(),
    });
    if spec.cole_hopf {
        if !f.is_zero() || g.is_some() {
            return Err(HarnessError::ConfigParse(
                "the Cole-Hopf comparison needs f = g = 0".into(),
            ));
        }
        let exact = cole_hopf_solve(&u0, cfg)?;
        let err = traj.final_state().sub(exact.final_state()).sup();
        data["cole_hopf_error"] = json!(err);
        checks.push(CheckReport::strict("cole_hopf_sup_error", err, spec.tolerances.cole_hopf));
    }
    let mut tables = vec![steps_table(&traj)];
    if spec.snapshots {
        tables.push(Table::raw("trajectory.csv", trajectory_csv(&traj)));
    }
    Ok(StudyOutput { checks, data, tables })
}

fn steps_table(traj: &GridTrajectory) -> Table {
    let mut header = vec!["t".to_string(), "sup_u".to_string()];
    for y in &traj.weight_centers {
        header.push(format!("energy_y={y}"));
        header.push(format!("dissipation_y={y}"));
    }
    let rows = traj
        .steps
        .iter()
        .map(|s| {
            let mut row = vec![s.t, s.sup_u];
            for (e, d) in &s.weighted {
                row.push(*e);
                row.push(*d);
            }
            row.iter().map(|v| v.to_string()).collect()
        })
        .collect();
    Table::new("steps.csv", header, rows)
}

fn terminal_table(res: &SteeringResult) -> Table {
    let mut rows = Vec::new();
    for st in &res.stages {
        let nodes = st.terminal.grid.nodes();
        for (x, u) in nodes.iter().zip(&st.terminal.values) {
            rows.push(vec![st.stage.clone(), x.to_string(), u.to_string()]);
        }
    }
    Table::new("terminal.csv", vec!["stage".into(), "x".into(), "u".into()], rows)
}

/// Ledger and terminal states without the bulky grid values.
fn result_json(res: &SteeringResult) -> Value {
    let mut v = serde_json::to_value(res).expect("steering results serialize");
    if let Some(stages) = v["stages"].as_array_mut() {
        for s in stages {
            if let Some(m) = s.as_object_mut() {
                m.remove("terminal");
            }
        }
    }
    v
}

/// Runs the steering pipeline and checks the terminal inequalities.
pub fn steer_study(spec: &SteerStudy) -> Result<StudyOutput, HarnessError> {
    let res = steer(&spec.steering)?;
    let s = &spec.steering;
    let mut checks = Vec::new();
    let mut stages = vec!["projection"];
    if res.last().stage != "projection" {
        stages.push(&res.last().stage);
    }
    for name in stages {
        let st = res.stage(name).expect("stage was recorded");
        for mut c in check_targets(&st.terminal, &s.uhat, s.epsilon, s.r, res.params.k_bound)? {
            c.name = format!("{name}/{}", c.name);
            checks.push(c);
        }
    }
    let mut data = json!({ "result": result_json(&res) });
    if !spec.r_values.is_empty() {
        let norms: Vec<(f64, f64)> = spec
            .r_values
            .par_iter()
            .map(|r| {
                let mut sr = s.clone();
                sr.r = *r;
                steer(&sr).map(|out| (*r, out.last().sup_norm))
            })
            .collect::<Result<_, _>>()?;
        let hi = norms.iter().map(|n| n.1).fold(f64::NEG_INFINITY, f64::max);
        let lo = norms.iter().map(|n| n.1).fold(f64::INFINITY, f64::min);
        let spread = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
        checks.push(CheckReport::strict("k_uniformity", spread, spec.tolerances.k_variation));
        data["terminal_sup_by_r"] = json!(norms);
    }
    let ledger = res
        .ledger_rows()
        .into_iter()
        .map(|(stage, norm, v)| vec![stage, norm.to_string(), v.to_string()])
        .collect();
    let tables = vec![
        Table::new("ledger.csv", vec!["stage".into(), "norm".into(), "value".into()], ledger),
        terminal_table(&res),
    ];
    Ok(StudyOutput { checks, data, tables })
}

/// Per-`m` measurements of the averaging study.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragingRow {
    pub m: usize,
    pub dt: f64,
    pub l2: f64,
    pub h1: f64,
}

/// `|u^m(T) - u~(T)|` on `[-r, r]` for every `m`, where `u^m` is driven by
/// `(eta_G, zeta_m)` and `u~` solves the averaged equation.
pub fn averaging_errors(study: &RelaxStudy, m_values: &[usize]) -> Result<Vec<AveragingRow>, HarnessError> {
    let cfg = &study.solver;
    let basis = *study.eta.basis();
    let gens = standard_generators(&basis);
    let g = make_control_space(&basis);
    let eta = Schedule::constant(cfg.t_final, study.eta.clone());
    let u0 = GridFunction::from_trig(cfg.grid()?, &study.u0);
    let base = relax_level(&eta, study.nu, 1, &gens, &g)?;
    let (fa, ga) = averaged_forcing(&base.eta_g, &base.zeta);
    let averaged = solve(&u0, &fa, Some(&ga), cfg)?;
    let target = averaged.final_state();
    let r = study.r;
    m_values
        .par_iter()
        .map(|&m| {
            let lvl = relax_level(&eta, study.nu, m, &gens, &g)?;
            let dwell = lvl
                .zeta
                .intervals
                .iter()
                .map(|iv| iv.min_weight() * (iv.end - iv.start))
                .fold(f64::INFINITY, f64::min);
            let dt = cfg.dt.min(dwell / (study.tolerances.steps_per_dwell * m as f64));
            let z = lvl.zeta.as_schedule();
            let run = solve(&u0, &lvl.eta_g, Some(&z), &SolverConfig { dt, ..cfg.clone() })?;
            let d = run.final_state().sub(target);
            Ok(AveragingRow {
                m,
                dt,
                l2: l2_interval(&d, -r, r)?,
                h1: hs_interval(&d, 1, -r, r)?,
            })
        })
        .collect()
}

/// Averaging in `m` and, when configured, the extension refinement study.
pub fn relax_study(study: &RelaxStudy) -> Result<StudyOutput, HarnessError> {
    let tol = &study.tolerances;
    let mut ms = study.m_values.clone();
    ms.sort_unstable();
    ms.dedup();
    let rows = averaging_errors(study, &ms)?;
    let mut checks = Vec::new();
    let first = &rows[0];
    if let Some(at) = rows.iter().find(|r| r.m == tol.m_check) {
        checks.push(CheckReport::strict(
            format!("averaging_ratio[m={}/m={}]", at.m, first.m),
            at.h1,
            tol.ratio * first.h1,
        ));
    }
    let tail = &rows[rows.len().saturating_sub(3)..];
    let worst = tail
        .windows(2)
        .map(|w| w[1].h1 / w[0].h1)
        .fold(0.0, f64::max);
    checks.push(CheckReport::strict("averaging_eventually_decreasing", worst, 1.0));
    let mut tables = vec![Table::new(
        "relax.csv",
        vec!["m".into(), "dt".into(), "l2_error".into(), "h1_error".into()],
        rows.iter()
            .map(|r| vec![r.m.to_string(), r.dt.to_string(), r.l2.to_string(), r.h1.to_string()])
            .collect(),
    )];
    let mut data = json!({
        "averaging": rows.iter().map(|r| json!({"m": r.m, "dt": r.dt, "l2": r.l2, "h1": r.h1})).collect::<Vec<_>>(),
    });
    if let Some(ext) = &study.extension {
        let (ext_rows, round_trip) = extension_errors(study)?;
        for (i, w) in ext_rows.windows(2).enumerate() {
            checks.push(CheckReport::new(
                format!("extension_halving[{i}]"),
                w[1].2,
                ext.ratio * w[0].2,
                0.0,
            ));
        }
        checks.push(CheckReport::strict("extension_round_trip", round_trip, ext.round_trip));
        tables.push(Table::new(
            "extension.csv",
            vec!["theta".into(), "dt".into(), "l2_error".into()],
            ext_rows
                .iter()
                .map(|(a, b, c)| vec![a.to_string(), b.to_string(), c.to_string()])
                .collect(),
        ));
        data["extension"] = json!({ "rows": ext_rows, "round_trip": round_trip });
    }
    Ok(StudyOutput { checks, data, tables })
}

/// Rows `(theta, dt, |u_abs(T) - u_shift(T)|_{L2(-r,r)})`, where `u_abs` solves
/// the plain equation with `eta_G + d/dt zeta_theta` and `u_shift` the shifted
/// one with the unmollified `zeta_m`; plus the mismatch at the first level
/// against the shifted equation driven by `zeta_theta` itself.
pub fn extension_errors(study: &RelaxStudy) -> Result<(Vec<(f64, f64, f64)>, f64), HarnessError> {
    let ext = study.extension.clone().unwrap_or_default();
    let cfg = &study.solver;
    let basis = *study.eta.basis();
    let eta = Schedule::constant(cfg.t_final, study.eta.clone());
    let lvl = relax_level(
        &eta,
        study.nu,
        ext.m,
        &standard_generators(&basis),
        &make_control_space(&basis),
    )?;
    let u0 = GridFunction::from_trig(cfg.grid()?, &study.u0);
    let theta0 = ext.theta.unwrap_or_else(|| default_theta(&lvl.zeta));
    let dt0 = cfg.dt.min(theta0 / ext.ramp_steps);
    let raw = lvl.zeta.as_schedule();
    let r = study.r;
    let rows: Vec<(f64, f64, f64)> = (0..ext.levels)
        .into_par_iter()
        .map(|l| {
            let s = 0.5f64.powi(l as i32);
            let (theta, dt) = (theta0 * s, dt0 * s);
            let c = SolverConfig { dt, ..cfg.clone() };
            let absorbed = absorb_zeta(&lvl.eta_g, &lvl.zeta, theta)?;
            let a = solve(&u0, &absorbed, None, &c)?;
            let b = solve(&u0, &lvl.eta_g, Some(&raw), &c)?;
            let e = l2_interval(&a.final_state().sub(b.final_state()), -r, r)?;
            Ok::<_, HarnessError>((theta, dt, e))
        })
        .collect::<Result<_, _>>()?;
    let c = SolverConfig { dt: dt0, ..cfg.clone() };
    let absorbed = absorb_zeta(&lvl.eta_g, &lvl.zeta, theta0)?;
    let smooth = lvl.zeta.mollified(theta0)?;
    let a = solve(&u0, &absorbed, None, &c)?;
    let b = solve(&u0, &lvl.eta_g, Some(&smooth), &c)?;
    let round_trip = l2_interval(&a.final_state().sub(b.final_state()), -r, r)?;
    Ok((rows, round_trip))
}

/// A seeded field with unit sup norm, periodic on the window.
fn random_field(rng: &mut CounterRng, modes: usize, half_length: f64, nodes: &[f64]) -> Vec<f64> {
    let terms: Vec<(f64, f64, f64)> = (0..modes)
        .map(|_| {
            let j = (rng.next_unit() * 16.0).floor() + 1.0;
            let a = rng.uniform(-1.0, 1.0);
            let phase = rng.uniform(0.0, 2.0 * PI);
            (j * PI / half_length, a, phase)
        })
        .collect();
    let v: Vec<f64> = nodes
        .iter()
        .map(|x| terms.iter().map(|(k, a, p)| a * (k * x + p).sin()).sum())
        .collect();
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 {
        return v;
    }
    v.iter().map(|x| x / m).collect()
}

/// `sup_t |u_1(t) - u_2(t)|_{L2(-r,r)}` for every `rho`, where `u_2` has `u0`
/// and `f` perturbed only on `|x| > rho`.
pub fn locality_effects(study: &LocalityStudy) -> Result<Vec<(f64, f64)>, HarnessError> {
    let mut cfg = study.solver.clone();
    if cfg.snapshot_stride == 0 {
        let steps = (cfg.t_final / cfg.dt).round() as usize;
        cfg.snapshot_stride = (steps / 50).max(1);
    }
    let grid = cfg.grid()?;
    let nodes = grid.nodes();
    let l = grid.half_length;
    let mut rng = CounterRng::new(study.rng_seed);
    let pu = random_field(&mut rng, study.modes, l, &nodes);
    let pf = random_field(&mut rng, study.modes, l, &nodes);
    let u0 = GridFunction::from_trig(grid, &study.u0);
    let f: &dyn Forcing = match &study.f {
        Some(f) => f,
        None => &NoForcing,
    };
    let base = solve(&u0, f, None, &cfg)?;
    let r = study.r;
    study
        .rho_fractions
        .par_iter()
        .map(|frac| {
            let rho = frac * l;
            let mask: Vec<f64> = nodes
                .iter()
                .map(|x| smoothstep((x.abs() - rho) / study.edge))
                .collect();
            let bump = |p: &[f64]| GridFunction {
                grid,
                values: p
                    .iter()
                    .zip(&mask)
                    .map(|(v, w)| study.amplitude * v * w)
                    .collect(),
            };
            let u2 = u0.add(&bump(&pu));
            let q = bump(&pf);
            let f2 = SumForcing(vec![f, &q]);
            let run = solve(&u2, &f2, None, &cfg)?;
            let mut effect = 0.0f64;
            for (a, b) in base.states.iter().zip(&run.states) {
                effect = effect.max(l2_interval(&a.sub(b), -r, r)?);
            }
            Ok((rho, effect))
        })
        .collect()
}

pub fn locality_study(study: &LocalityStudy) -> Result<StudyOutput, HarnessError> {
    let mut effects = locality_effects(study)?;
    effects.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tol = &study.tolerances;
    let mut checks: Vec<CheckReport> = effects
        .windows(2)
        .map(|w| {
            CheckReport::new(
                format!("locality_nonincreasing[rho={:.4}]", w[1].0),
                w[1].1,
                w[0].1,
                tol.monotone_slack,
            )
        })
        .collect();
    let far = effects.last().expect("non-empty rho list");
    checks.push(CheckReport::strict(
        format!("locality_far_field[rho={:.4}]", far.0),
        far.1,
        tol.delta,
    ));
    let table = Table::new(
        "locality.csv",
        vec!["rho".into(), "effect".into()],
        effects
            .iter()
            .map(|(a, b)| vec![a.to_string(), b.to_string()])
            .collect(),
    );
    let data = json!({ "rng_seed": study.rng_seed, "effects": effects });
    Ok(StudyOutput {
        checks,
        data,
        tables: vec![table],
    })
}

/// Largest gap between consecutive elements of `values` (sorted) and the
/// window end, restricted to `[0, window]`.
pub fn max_gap(values: &[f64], window: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| *x <= window).collect();
    v.sort_by(f64::total_cmp);
    let mut gap = window - v.last().copied().unwrap_or(0.0);
    let mut prev = 0.0;
    for x in v {
        gap = gap.max(x - prev);
        prev = x;
    }
    gap
}

pub fn lattice_report(spec: &LatticeReportSpec) -> Result<StudyOutput, HarnessError> {
    let basis = spec.basis;
    let lam = enumerate_lattice(spec.k, &basis);
    let mut freqs: Vec<_> = lam.iter().copied().collect();
    freqs.sort_by(|a, b| a.value().total_cmp(&b.value()).then(a.coords().cmp(&b.coords())));
    let rows = freqs
        .iter()
        .map(|f| {
            vec![
                f.n1().to_string(),
                f.n2().to_string(),
                f.value().to_string(),
                f.order().to_string(),
            ]
        })
        .collect();
    let mut checks = Vec::new();
    let mut data = json!({ "k": spec.k, "count": freqs.len() });
    if let Some(w) = spec.gap_window {
        let values: Vec<f64> = freqs.iter().map(|f| f.value()).collect();
        let gap = max_gap(&values, w);
        checks.push(CheckReport::strict(format!("lattice_max_gap[0,{w}]"), gap, spec.gap_bound));
        data["max_gap"] = json!(gap);
    }
    if let Some(depth) = spec.span_depth {
        let gens = standard_generators(&basis);
        let mut g = make_control_space(&basis);
        let mut sizes = Vec::new();
        for j in 1..=depth {
            g = convexification_span(&gens, &g)?;
            let missing = enumerate_lattice(j, &basis)
                .iter()
                .filter(|f| !g.contains(f))
                .count();
            sizes.push(g.len());
            checks.push(CheckReport::new(
                format!("span_contains_lambda[{j}]"),
                missing as f64,
                0.0,
                0.0,
            ));
        }
        data["span_sizes"] = json!(sizes);
    }
    if let Some(order) = spec.saturation_order {
        let mut worst = 0.0f64;
        let mut count = 0;
        for f in enumerate_lattice(order, &basis).iter() {
            if let Ok(id) = saturation_decompose(f, &basis) {
                count += 1;
                worst = worst
                    .max(id.sine_residual(&basis).max_coefficient())
                    .max(id.cosine_residual(&basis).max_coefficient());
            }
        }
        checks.push(CheckReport::new(
            format!("saturation_residual[order<={order}]"),
            worst,
            spec.residual_tol,
            0.0,
        ));
        data["saturation_identities"] = json!(count);
    }
    Ok(StudyOutput {
        checks,
        data,
        tables: vec![Table::new(
            "lattice.csv",
            vec!["n1".into(), "n2".into(), "value".into(), "order".into()],
            rows,
        )],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_helper() {
        assert_eq!(max_gap(&[0.0, 1.0, 1.5], 2.0), 1.0);
        assert_eq!(max_gap(&[0.0, 0.4, 3.0], 1.0), 0.6);
    }

    #[test]
    fn unit_sup_field() {
        let nodes: Vec<f64> = (0..64).map(|i| -PI + i as f64 * PI / 32.0).collect();
        let mut rng = CounterRng::new(7);
        let v = random_field(&mut rng, 3, PI, &nodes);
        let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!((m - 1.0).abs() < 1e-15);
    }
}
