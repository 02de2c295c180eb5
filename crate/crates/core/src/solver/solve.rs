use rustfft::num_complex::Complex64;

use super::forcing::{Forcing, Sampler, Side};
use super::grid::{Grid, GridFunction, GridTrajectory, StepRecord};
use super::norms::periodic_weight;
use super::spectral::Spectral;
use super::{SolverConfig, SolverError};
use crate::smooth::smoothstep;

pub const BLOWUP_THRESHOLD: f64 = 1e6;
const CFL: f64 = 0.5;

/// Smooth factor equal to one away from `x = +-L` and vanishing there.
pub fn edge_taper(grid: &Grid, width: f64) -> Vec<f64> {
    grid.nodes()
        .iter()
        .map(|x| smoothstep((grid.half_length - x.abs()) / width))
        .collect()
}

/// Merged, sorted stopping times in `[0, T]`.
pub(crate) fn stop_times(cfg: &SolverConfig, extra: &[f64]) -> Vec<f64> {
    let t_final = cfg.t_final;
    let tol = 1e-12 * t_final;
    let mut all: Vec<f64> = cfg.snapshot_times();
    all.extend(extra.iter().copied().filter(|t| *t > tol && *t < t_final - tol));
    all.sort_by(f64::total_cmp);
    all.dedup_by(|a, b| (*a - *b).abs() <= tol);
    all
}

struct Rhs<'a> {
    sp: &'a Spectral,
    mu: f64,
    dealias: bool,
    taper: Option<Vec<f64>>,
    f: Option<Box<dyn Sampler + 'a>>,
    g: Option<Box<dyn Sampler + 'a>>,
    fbuf: Vec<f64>,
    gbuf: Vec<f64>,
}

impl Rhs<'_> {
    fn taper(&self, v: &mut [f64]) {
        if let Some(tp) = &self.taper {
            for (a, b) in v.iter_mut().zip(tp) {
                *a *= b;
            }
        }
    }

    fn sample_g(&mut self, t: f64, side: Side) -> bool {
        match self.g.as_mut() {
            Some(g) => {
                g.sample(t, side, &mut self.gbuf);
                let mut buf = std::mem::take(&mut self.gbuf);
                self.taper(&mut buf);
                self.gbuf = buf;
                true
            }
            None => false,
        }
    }

    /// `F(f) - mu k^2 F(g) - (i k / 2) F((u + g)^2)`.
    fn eval(&mut self, uh: &[Complex64], t: f64, side: Side) -> Vec<Complex64> {
        let sp = self.sp;
        let n = sp.n();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        if let Some(f) = self.f.as_mut() {
            f.sample(t, side, &mut self.fbuf);
            let mut buf = std::mem::take(&mut self.fbuf);
            self.taper(&mut buf);
            out = sp.forward(&buf);
            self.fbuf = buf;
        }
        let mut w: Vec<Complex64> = uh.to_vec();
        if self.sample_g(t, side) {
            let gh = sp.forward(&self.gbuf);
            for j in 0..n {
                out[j] -= self.mu * sp.k[j] * sp.k[j] * gh[j];
                w[j] += gh[j];
            }
        }
        if self.dealias {
            sp.apply_mask(&mut w);
        }
        let phys = sp.inverse(&w);
        let sq: Vec<f64> = phys.iter().map(|v| v * v).collect();
        let mut nl = sp.forward(&sq);
        if self.dealias {
            sp.apply_mask(&mut nl);
        }
        let nyq = n / 2;
        for j in 0..n {
            if j == nyq {
                continue;
            }
            out[j] -= Complex64::new(0.0, 0.5 * sp.k[j]) * nl[j];
        }
        out
    }
}

struct Monitor {
    weights: Vec<Vec<f64>>,
    centers: Vec<f64>,
    dx: f64,
}

impl Monitor {
    fn new(grid: &Grid) -> Self {
        let l = grid.half_length;
        let centers = vec![-l / 2.0, 0.0, l / 2.0];
        let weights = centers.iter().map(|y| periodic_weight(grid, *y)).collect();
        Self {
            weights,
            centers,
            dx: grid.dx(),
        }
    }

    fn record(&self, sp: &Spectral, t: f64, u: &[f64], uh: &[Complex64]) -> StepRecord {
        let mut d = uh.to_vec();
        sp.differentiate(&mut d, 1);
        let ux = sp.inverse(&d);
        let weighted = self
            .weights
            .iter()
            .map(|w| {
                let e: f64 = w.iter().zip(u).map(|(a, b)| a * b * b).sum();
                let dd: f64 = w.iter().zip(&ux).map(|(a, b)| a * b * b).sum();
                (e * self.dx, dd * self.dx)
            })
            .collect();
        StepRecord {
            t,
            sup_u: u.iter().fold(0.0, |m, v| m.max(v.abs())),
            weighted,
        }
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Integrates `u_t - mu (u + g)_xx + (u + g)(u + g)_x = f` from `u0`.
///
/// Diffusion is handled by an exact integrating factor and the remaining terms
/// by the two-stage strong-stability-preserving Runge-Kutta rule. Steps land
/// exactly on snapshot times and on forcing breakpoints, and shrink when the
/// CFL bound `dt <= 0.5 dx / (max|u| + max|g|)` requires it.
pub fn solve(
    u0: &GridFunction,
    f: &dyn Forcing,
    g: Option<&dyn Forcing>,
    cfg: &SolverConfig,
) -> Result<GridTrajectory, SolverError> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    if u0.grid != grid {
        return Err(SolverError::InvalidConfig(
            "initial state lives on a different grid".into(),
        ));
    }
    let sp = Spectral::new(grid);
    let n = grid.n;
    let taper = cfg.edge_taper.map(|w| edge_taper(&grid, w));
    let g = g.filter(|g| !g.is_zero());
    let mut breaks = f.breakpoints();
    if let Some(g) = g {
        breaks.extend(g.breakpoints());
    }
    let stops = stop_times(cfg, &breaks);
    let snaps = cfg.snapshot_times();

    let mut rhs = Rhs {
        sp: &sp,
        mu: cfg.mu,
        dealias: cfg.dealias,
        taper: taper.clone(),
        f: if f.is_zero() { None } else { Some(f.sampler(&grid)) },
        g: g.map(|g| g.sampler(&grid)),
        fbuf: vec![0.0; n],
        gbuf: vec![0.0; n],
    };

    let mut u = u0.values.clone();
    if let Some(tp) = &taper {
        for (a, b) in u.iter_mut().zip(tp) {
            *a *= b;
        }
    }
    let mut uh = sp.forward(&u);
    let monitor = Monitor::new(&grid);
    let mut steps = vec![monitor.record(&sp, 0.0, &u, &uh)];
    let mut times = vec![0.0];
    let mut states = vec![GridFunction { grid, values: u.clone() }];
    let mut snap_idx = 1;

    let mut t = 0.0;
    let mut factor_cache: Option<(f64, Vec<f64>)> = None;
    for &stop in stops.iter().skip(1) {
        let mut nominal = cfg.dt;
        let mut remaining = ((stop - t) / nominal - 1e-9).ceil().max(1.0) as usize;
        let mut h = (stop - t) / remaining as f64;
        while remaining > 0 {
            let gmax = if rhs.sample_g(t, Side::Right) { sup(&rhs.gbuf) } else { 0.0 };
            let speed = sup(&u) + gmax;
            if speed > 0.0 {
                let limit = CFL * grid.dx() / speed;
                if h > limit {
                    nominal = limit;
                    remaining = ((stop - t) / nominal).ceil().max(1.0) as usize;
                    h = (stop - t) / remaining as f64;
                    if h < cfg.dt_floor {
                        return Err(SolverError::CflViolation { t, dt: h });
                    }
                }
            }
            let last = remaining == 1;
            let t_next = if last { stop } else { t + h };
            let hh = t_next - t;
            let e = match &factor_cache {
                Some((key, e)) if *key == hh => e.clone(),
                _ => {
                    let e = sp.heat_factor(cfg.mu, hh);
                    factor_cache = Some((hh, e.clone()));
                    e
                }
            };

            let n0 = rhs.eval(&uh, t, Side::Right);
            let u1: Vec<Complex64> = (0..n).map(|j| e[j] * (uh[j] + hh * n0[j])).collect();
            let n1 = rhs.eval(&u1, t_next, Side::Left);
            for j in 0..n {
                uh[j] = 0.5 * e[j] * uh[j] + 0.5 * (u1[j] + hh * n1[j]);
            }

            t = t_next;
            remaining -= 1;
            u = sp.inverse(&uh);
            let m = sup(&u);
            if !m.is_finite() || m > BLOWUP_THRESHOLD {
                return Err(SolverError::BlowUp { t, max: m });
            }
            steps.push(monitor.record(&sp, t, &u, &uh));
        }
        t = stop;
        if snap_idx < snaps.len() && (snaps[snap_idx] - stop).abs() <= 1e-12 * cfg.t_final {
            times.push(snaps[snap_idx]);
            states.push(GridFunction { grid, values: u.clone() });
            snap_idx += 1;
        }
    }

    Ok(GridTrajectory {
        times,
        states,
        steps,
        weight_centers: monitor.centers,
    })
}
