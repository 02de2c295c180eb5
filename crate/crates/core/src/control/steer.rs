//! The steering pipeline: reference control, cutoff, projection onto a finite
//! lattice space, then optional relaxation levels toward lower orders.

use serde::{Deserialize, Serialize};

use super::projection::{choose_projection_params, fourier_project, ProjectionParams};
use super::reference::{spatial_cutoff, straight_line_control};
use super::relax::{absorb_zeta, default_theta, relax_level, RAMP_STEPS};
use super::schedule::{ControlSchedule, Schedule};
use super::ControlError;
use crate::solver::{
    edge_taper, l2_interval, solve, Forcing, Grid, GridFunction, SolverConfig, SumForcing,
};
use crate::trig::{make_frequency, standard_generators, OrderBall, TrigPoly};

fn one() -> f64 {
    1.0
}

/// Problem data and pipeline knobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteeringSpec {
    pub u0: TrigPoly,
    pub uhat: TrigPoly,
    #[serde(default = "one")]
    pub t_final: f64,
    pub epsilon: f64,
    /// Half-width of the interval `[-r, r]` where the target is checked.
    pub r: f64,
    pub mu: f64,
    /// Fixed, time-independent force.
    #[serde(default)]
    pub h: Option<TrigPoly>,
    #[serde(default)]
    pub knobs: SteeringKnobs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteeringKnobs {
    /// Cutoff radius `n`; defaults to `ceil(r) + 4`.
    pub n_cutoff: Option<u64>,
    /// Lattice coordinates of `omega`; chosen automatically when absent.
    pub omega: Option<(i64, i64)>,
    /// Number `N` of harmonics; defaults to `ceil(band / omega)`.
    pub harmonics: Option<usize>,
    pub band: f64,
    /// Window half-length in units of `pi / omega` (a power of two).
    pub window_periods: usize,
    pub n_grid: usize,
    pub dt: f64,
    /// Width of the smooth taper at the window edges.
    pub taper: f64,
    /// Number of relaxation levels after the projection.
    pub depth: usize,
    pub m: usize,
    pub theta: Option<f64>,
    pub quantization: usize,
    pub nu: f64,
    /// Terminal sup-norm bound `K`; defaults to twice the largest amplitude plus one half.
    pub k_bound: Option<f64>,
}

impl Default for SteeringKnobs {
    fn default() -> Self {
        Self {
            n_cutoff: None,
            omega: None,
            harmonics: None,
            band: 6.0,
            window_periods: 1,
            n_grid: 1024,
            dt: 1e-3,
            taper: 2.0,
            depth: 0,
            m: 4,
            theta: None,
            quantization: 16,
            nu: 1e-3,
            k_bound: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolvedParams {
    pub n_cutoff: u64,
    pub projection: ProjectionParams,
    pub harmonics: usize,
    /// `N * order(omega)`.
    pub image_order: u64,
    pub half_length: f64,
    pub n_grid: usize,
    pub dt: f64,
    pub k_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: String,
    /// `|u(T) - uhat|` in `L^2(-r, r)`.
    pub l2_error: f64,
    /// `|u(T) - uhat|` in `sup` over the nodes of `[-r, r]`.
    pub sup_error: f64,
    /// `|u(T)|` in `sup` over the window.
    pub sup_norm: f64,
    /// Largest lattice order of an exact control.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control_order: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control: Option<ControlSchedule>,
    pub terminal: GridFunction,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SteeringResult {
    pub params: ResolvedParams,
    pub stages: Vec<StageRecord>,
    pub epsilon: f64,
    pub r: f64,
}

impl SteeringResult {
    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.stage == name)
    }

    pub fn last(&self) -> &StageRecord {
        self.stages.last().expect("at least one stage")
    }

    /// Both terminal inequalities at the last stage.
    pub fn targets_met(&self) -> bool {
        let s = self.last();
        s.l2_error < self.epsilon && s.sup_norm <= self.params.k_bound
    }

    /// Rows `(stage, norm, value)`.
    pub fn ledger_rows(&self) -> Vec<(String, &'static str, f64)> {
        let mut rows = Vec::new();
        for s in &self.stages {
            rows.push((s.stage.clone(), "l2_error", s.l2_error));
            rows.push((s.stage.clone(), "sup_error", s.sup_error));
            rows.push((s.stage.clone(), "sup_norm", s.sup_norm));
        }
        rows
    }
}

/// `L^2(-r, r)` and sup distance between `ut` and `uhat`.
///
/// The difference is tapered at the window edges first so that its periodic
/// interpolant has no seam; the taper equals one on `[-r, r]`.
pub fn interval_errors(
    ut: &GridFunction,
    uhat: &TrigPoly,
    r: f64,
    taper_width: f64,
) -> Result<(f64, f64), ControlError> {
    let grid = ut.grid;
    let target = GridFunction::from_trig(grid, uhat);
    let tp = edge_taper(&grid, taper_width);
    let diff = GridFunction {
        grid,
        values: ut
            .values
            .iter()
            .zip(&target.values)
            .zip(&tp)
            .map(|((a, b), w)| (a - b) * w)
            .collect(),
    };
    let l2 = l2_interval(&diff, -r, r)?;
    let sup = grid
        .nodes()
        .iter()
        .zip(&diff.values)
        .filter(|(x, _)| x.abs() <= r)
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    Ok((l2, sup))
}

struct Context<'a> {
    spec: &'a SteeringSpec,
    cfg: SolverConfig,
    grid: Grid,
    u0: GridFunction,
    h: ControlSchedule,
}

impl Context<'_> {
    fn run(
        &self,
        stage: &str,
        control: &dyn Forcing,
        dt: f64,
    ) -> Result<(GridFunction, f64, f64, f64), ControlError> {
        let cfg = SolverConfig { dt, ..self.cfg.clone() };
        let f = SumForcing(vec![&self.h, control]);
        let traj = solve(&self.u0, &f, None, &cfg).map_err(|e| fail(stage, e.into()))?;
        let ut = traj.final_state().clone();
        let (l2, sup) = interval_errors(&ut, &self.spec.uhat, self.spec.r, self.spec.knobs.taper)
            .map_err(|e| fail(stage, e))?;
        let norm = ut.sup();
        Ok((ut, l2, sup, norm))
    }
}

fn fail(stage: &str, e: ControlError) -> ControlError {
    ControlError::StageFailure {
        stage: stage.to_string(),
        source: Box::new(e),
    }
}

/// Resolves the knobs into concrete parameters.
pub fn resolve_params(spec: &SteeringSpec) -> Result<ResolvedParams, ControlError> {
    let k = &spec.knobs;
    let bad = |m: String| Err(ControlError::InvalidSpec(m));
    if !(spec.epsilon > 0.0) {
        return bad(format!("epsilon must be positive, got {}", spec.epsilon));
    }
    if !(spec.r > 0.0) {
        return bad(format!("r must be positive, got {}", spec.r));
    }
    if spec.u0.basis() != spec.uhat.basis() {
        return bad("u0 and uhat use different frequency bases".into());
    }
    if !k.window_periods.is_power_of_two() {
        return bad(format!("window_periods must be a power of two, got {}", k.window_periods));
    }
    let basis = *spec.u0.basis();
    let n_cutoff = k.n_cutoff.unwrap_or(spec.r.ceil() as u64 + 4);
    let projection = match k.omega {
        Some((n1, n2)) => {
            let omega = make_frequency(n1, n2, &basis)?;
            if omega.is_zero() {
                return bad("omega must be positive".into());
            }
            ProjectionParams {
                omega,
                order: omega.order(),
                bound: std::f64::consts::PI / (2.0 * n_cutoff as f64).max(spec.r),
            }
        }
        None => choose_projection_params(n_cutoff, spec.r, &basis)?,
    };
    let half_length = projection.snapped_half_length(k.window_periods);
    if spec.r > half_length / 2.0 {
        return bad(format!("r = {} exceeds half the window {half_length}", spec.r));
    }
    let harmonics = k
        .harmonics
        .unwrap_or_else(|| (k.band / projection.omega.value()).ceil() as usize);
    let amp = spec.u0.amplitude_bound().max(spec.uhat.amplitude_bound());
    Ok(ResolvedParams {
        n_cutoff,
        projection,
        harmonics,
        image_order: projection.image_order(harmonics),
        half_length,
        n_grid: k.n_grid,
        dt: k.dt,
        k_bound: k.k_bound.unwrap_or(2.0 * amp + 0.5),
    })
}

/// Runs every stage and records the terminal errors after each one.
///
/// Stage errors are wrapped in [`ControlError::StageFailure`]; a target that is
/// missed is not an error and shows up in the ledger instead.
pub fn steer(spec: &SteeringSpec) -> Result<SteeringResult, ControlError> {
    let params = resolve_params(spec)?;
    let knobs = &spec.knobs;
    let basis = *spec.u0.basis();
    let cfg = SolverConfig::new(spec.mu, params.half_length, knobs.n_grid, knobs.dt, spec.t_final)
        .with_taper(knobs.taper);
    cfg.validate().map_err(|e| fail("setup", e.into()))?;
    let grid = cfg.grid()?;
    let h = Schedule::constant(
        spec.t_final,
        spec.h.clone().unwrap_or_else(|| TrigPoly::zero(basis)),
    );
    let ctx = Context {
        spec,
        cfg,
        grid,
        u0: GridFunction::from_trig(grid, &spec.u0),
        h: h.clone(),
    };
    let mut stages = Vec::new();
    let record = |stage: &str,
                  out: (GridFunction, f64, f64, f64),
                  control: Option<ControlSchedule>,
                  residual_bound: Option<f64>| StageRecord {
        stage: stage.to_string(),
        l2_error: out.1,
        sup_error: out.2,
        sup_norm: out.3,
        control_order: control.as_ref().map(|c| c.max_order()),
        residual_bound,
        control,
        terminal: out.0,
    };

    let eta = straight_line_control(&spec.u0, &spec.uhat, spec.t_final, &h, spec.mu)
        .map_err(|e| fail("reference", e))?;
    let out = ctx.run("reference", &eta, knobs.dt)?;
    stages.push(record("reference", out, Some(eta.clone()), None));

    let eta_n = spatial_cutoff(&eta, params.n_cutoff, &ctx.grid).map_err(|e| fail("cutoff", e))?;
    let out = ctx.run("cutoff", &eta_n, knobs.dt)?;
    stages.push(record("cutoff", out, None, None));

    let eta_k = fourier_project(&eta_n, &params.projection.omega, params.harmonics, &basis)
        .map_err(|e| fail("projection", e))?;
    let out = ctx.run("projection", &eta_k, knobs.dt)?;
    stages.push(record("projection", out, Some(eta_k.clone()), None));

    let gens = standard_generators(&basis);
    let mut current = eta_k;
    for level in 1..=knobs.depth {
        let name = format!("relax-{level}");
        let q = current.quantize(knobs.quantization).map_err(|e| fail(&name, e))?;
        let top = q.max_order();
        if top <= 2 {
            break;
        }
        let relaxed = relax_level(&q, knobs.nu, knobs.m, &gens, &OrderBall(top - 1))
            .map_err(|e| fail(&name, e))?;
        let theta = knobs.theta.unwrap_or_else(|| default_theta(&relaxed.zeta));
        let absorbed =
            absorb_zeta(&relaxed.eta_g, &relaxed.zeta, theta).map_err(|e| fail(&name, e))?;
        let dwell = relaxed
            .zeta
            .intervals
            .iter()
            .map(|iv| iv.min_weight() * (iv.end - iv.start) / (10.0 * knobs.m as f64))
            .fold(f64::INFINITY, f64::min);
        let dt = knobs.dt.min(theta / RAMP_STEPS).min(dwell);
        let out = ctx.run(&name, &absorbed, dt)?;
        let bound = relaxed.residual_bound();
        stages.push(record(&name, out, Some(absorbed.clone()), Some(bound)));
        current = absorbed;
    }

    Ok(SteeringResult {
        params,
        stages,
        epsilon: spec.epsilon,
        r: spec.r,
    })
}
