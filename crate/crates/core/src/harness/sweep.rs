//! One-axis convergence sweeps.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::checks::CheckReport;
use super::spec::{SimulateSpec, SweepSpec};
use super::studies::averaging_errors;
use super::{HarnessError, StudyOutput, Table};
use crate::control::{
    fourier_project, resolve_params, spatial_cutoff, straight_line_control, ControlError,
    GriddedSchedule, Schedule, SteeringSpec,
};
use crate::quad;
use crate::solver::{
    cole_hopf_solve, solve, Grid, GridFunction, NoForcing, Side, SolverConfig, SolverError,
};
use crate::trig::TrigPoly;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis: String,
    /// Sorted by axis value.
    pub rows: Vec<SweepRow>,
    /// Whether the error falls over the final three points in refinement
    /// order (strictly, or sits at exactly zero).
    pub monotone: bool,
}

impl SweepTable {
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![self.axis.clone(), r.value.to_string(), r.error.to_string()])
            .collect()
    }
}

/// Strictly decreasing, where a step between two exact zeros also counts.
pub fn monotone_tail(errors: &[f64], points: usize) -> bool {
    let tail = &errors[errors.len().saturating_sub(points)..];
    tail.windows(2)
        .all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0))
}

struct Problem {
    eta: Schedule<TrigPoly>,
    grid: Grid,
    basis: crate::trig::FrequencyBasis,
}

fn problem(spec: &SteeringSpec) -> Result<(Problem, crate::control::ResolvedParams), ControlError> {
    let params = resolve_params(spec)?;
    let basis = *spec.u0.basis();
    let h = Schedule::constant(
        spec.t_final,
        spec.h.clone().unwrap_or_else(|| TrigPoly::zero(basis)),
    );
    let eta = straight_line_control(&spec.u0, &spec.uhat, spec.t_final, &h, spec.mu)?;
    let grid = Grid::new(params.half_length, spec.knobs.n_grid)?;
    Ok((Problem { eta, grid, basis }, params))
}

/// Trapezoid sum over the nodes in `[-rho, rho]`; exactly zero when the
/// samples vanish there.
fn nodal_l2(gf: &GridFunction, rho: f64) -> f64 {
    let nodes = gf.grid.nodes();
    let inside: Vec<f64> = nodes
        .iter()
        .zip(&gf.values)
        .filter(|(x, _)| x.abs() <= rho)
        .map(|(_, v)| v * v)
        .collect();
    let n = inside.len();
    let s: f64 = inside
        .iter()
        .enumerate()
        .map(|(i, v)| if i == 0 || i + 1 == n { 0.5 * v } else { *v })
        .sum();
    (s * gf.grid.dx()).sqrt()
}

/// `|a - b|` in `L2(J x (-rho, rho))`, Gauss-Legendre in time.
fn space_time_l2(
    grid: &Grid,
    horizon: f64,
    rho: f64,
    mut diff: impl FnMut(f64) -> GridFunction,
) -> Result<f64, HarnessError> {
    if !(rho > 0.0 && rho <= grid.half_length) {
        return Err(SolverError::IntervalOutOfWindow {
            a: -rho,
            b: rho,
            half_length: grid.half_length,
        }
        .into());
    }
    let mut acc = 0.0;
    for (x, w) in quad::gauss_legendre(8) {
        let t = 0.5 * horizon * (x + 1.0);
        let e = nodal_l2(&diff(t), rho);
        acc += 0.5 * horizon * w * e * e;
    }
    Ok(acc.sqrt())
}

fn eval_grid(s: &GriddedSchedule, t: f64) -> GridFunction {
    s.eval(t, Side::Right)
}

fn cutoff_errors(spec: &SteeringSpec, rho: f64, values: &[u64]) -> Result<Vec<f64>, HarnessError> {
    let (p, _) = problem(spec)?;
    // same arithmetic as the cutoff, so the difference is exactly zero where chi = 1
    let full = p.eta.map(|q| GridFunction::from_trig(p.grid, q));
    values
        .par_iter()
        .map(|&n| {
            let eta_n = spatial_cutoff(&p.eta, n, &p.grid)?;
            space_time_l2(&p.grid, spec.t_final, rho, |t| {
                eval_grid(&eta_n, t).sub(&eval_grid(&full, t))
            })
        })
        .collect()
}

/// Errors and the largest lattice order of each projected control.
fn harmonic_errors(
    spec: &SteeringSpec,
    rho: f64,
    values: &[usize],
) -> Result<(Vec<f64>, Vec<(u64, u64)>), HarnessError> {
    let (p, params) = problem(spec)?;
    let eta_n = spatial_cutoff(&p.eta, params.n_cutoff, &p.grid)?;
    let omega = params.projection.omega;
    let out: Vec<(f64, (u64, u64))> = values
        .par_iter()
        .map(|&big_n| {
            let proj = fourier_project(&eta_n, &omega, big_n, &p.basis)?;
            let err = space_time_l2(&p.grid, spec.t_final, rho, |t| {
                GridFunction::from_trig(p.grid, &proj.eval(t, Side::Right)).sub(&eval_grid(&eta_n, t))
            })?;
            Ok((err, (proj.max_order(), params.projection.image_order(big_n))))
        })
        .collect::<Result<_, HarnessError>>()?;
    Ok(out.into_iter().unzip())
}

fn oracle_errors(sim: &SimulateSpec, configs: Vec<SolverConfig>) -> Result<Vec<f64>, HarnessError> {
    configs
        .par_iter()
        .map(|cfg| {
            let u0 = GridFunction::from_trig(cfg.grid()?, &sim.u0);
            let run = solve(&u0, &NoForcing, None, cfg)?;
            let exact = cole_hopf_solve(&u0, cfg)?;
            Ok(run.final_state().sub(exact.final_state()).sup())
        })
        .collect()
}

/// Runs every point of the axis (concurrently) and tabulates `(axis, value, error)`.
pub fn convergence_sweep(spec: &SweepSpec) -> Result<(SweepTable, Vec<CheckReport>), HarnessError> {
    let mut extra = Vec::new();
    // (value, error) in the order given, plus whether larger values refine
    let (pairs, larger_refines): (Vec<(f64, f64)>, bool) = match spec {
        SweepSpec::Cutoff { steering, rho, values } => {
            let e = cutoff_errors(steering, *rho, values)?;
            (values.iter().map(|v| *v as f64).zip(e).collect(), true)
        }
        SweepSpec::Harmonics { steering, rho, values } => {
            let (e, orders) = harmonic_errors(steering, *rho, values)?;
            let over = orders.iter().filter(|(got, cap)| got > cap).count();
            extra.push(CheckReport::new("projection_containment", over as f64, 0.0, 0.0));
            (values.iter().map(|v| *v as f64).zip(e).collect(), true)
        }
        SweepSpec::Oscillation { study, values } => {
            let rows = averaging_errors(study, values)?;
            (rows.iter().map(|r| (r.m as f64, r.h1)).collect(), true)
        }
        SweepSpec::GridSize { simulate, values } => {
            let cfgs = values
                .iter()
                .map(|n| SolverConfig { n_grid: *n, ..simulate.solver.clone() })
                .collect();
            let e = oracle_errors(simulate, cfgs)?;
            (values.iter().map(|v| *v as f64).zip(e).collect(), true)
        }
        SweepSpec::TimeStep { simulate, values } => {
            let cfgs = values
                .iter()
                .map(|dt| SolverConfig { dt: *dt, ..simulate.solver.clone() })
                .collect();
            let e = oracle_errors(simulate, cfgs)?;
            (values.iter().copied().zip(e).collect(), false)
        }
    };
    let mut rows: Vec<SweepRow> = pairs
        .into_iter()
        .map(|(value, error)| SweepRow { value, error })
        .collect();
    rows.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut refine: Vec<f64> = rows.iter().map(|r| r.error).collect();
    if !larger_refines {
        refine.reverse();
    }
    let monotone = monotone_tail(&refine, 3);
    let table = SweepTable {
        axis: spec.axis().to_string(),
        rows,
        monotone,
    };
    let mut checks = vec![CheckReport::flag(
        format!("sweep_monotone[{}]", table.axis),
        monotone,
    )];
    checks.extend(extra);
    Ok((table, checks))
}

pub fn sweep_study(spec: &SweepSpec) -> Result<StudyOutput, HarnessError> {
    let (table, checks) = convergence_sweep(spec)?;
    let csv = Table::new(
        "sweep.csv",
        vec!["axis".into(), "value".into(), "error".into()],
        table.csv_rows(),
    );
    Ok(StudyOutput {
        checks,
        data: json!({ "sweep": table }),
        tables: vec![csv],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_rule() {
        assert!(monotone_tail(&[5.0, 3.0, 2.0, 1.0], 3));
        assert!(monotone_tail(&[1.0, 3.0, 2.0, 1.0], 3));
        assert!(!monotone_tail(&[3.0, 2.0, 2.0], 3));
        assert!(monotone_tail(&[3.0, 0.0, 0.0], 3));
        assert!(!monotone_tail(&[0.0, 0.0, 1e-17], 3));
    }
}
