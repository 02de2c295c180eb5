use super::forcing::{Forcing, Side};
use super::grid::{GridFunction, GridTrajectory};
use super::solve::stop_times;
use super::spectral::Spectral;
use super::{SolverConfig, SolverError};

/// Periodic heat semigroup: multiplies every mode by `exp(-mu k^2 t)`.
pub fn heat_convolve(gf: &GridFunction, t: f64, mu: f64) -> GridFunction {
    assert!(t >= 0.0, "heat propagation needs t >= 0");
    if t == 0.0 {
        return gf.clone();
    }
    let sp = Spectral::new(gf.grid);
    let mut c = sp.forward(&gf.values);
    for (c, e) in c.iter_mut().zip(sp.heat_factor(mu, t)) {
        *c *= e;
    }
    GridFunction {
        grid: gf.grid,
        values: sp.inverse(&c),
    }
}

/// `(K f)(t) = int_0^t K_{t-s} * f(s) ds` by the trapezoid rule in time.
///
/// With `E = exp(-mu k^2 h)` the recursion is
/// `w_{n+1} = E w_n + (h/2) (E f_n + f_{n+1})`.
pub fn duhamel(f: &dyn Forcing, cfg: &SolverConfig) -> Result<GridTrajectory, SolverError> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let sp = Spectral::new(grid);
    let n = grid.n;
    let stops = stop_times(cfg, &f.breakpoints());
    let snaps = cfg.snapshot_times();
    let mut sampler = f.sampler(&grid);
    let mut buf = vec![0.0; n];

    let mut w = vec![rustfft::num_complex::Complex64::new(0.0, 0.0); n];
    let mut times = vec![0.0];
    let mut states = vec![GridFunction::zeros(grid)];
    let mut snap_idx = 1;
    let mut t = 0.0;
    for &stop in stops.iter().skip(1) {
        let steps = ((stop - t) / cfg.dt - 1e-9).ceil().max(1.0) as usize;
        let h = (stop - t) / steps as f64;
        let e = sp.heat_factor(cfg.mu, h);
        for i in 0..steps {
            let t1 = if i + 1 == steps { stop } else { t + h };
            sampler.sample(t, Side::Right, &mut buf);
            let f0 = sp.forward(&buf);
            sampler.sample(t1, Side::Left, &mut buf);
            let f1 = sp.forward(&buf);
            for j in 0..n {
                w[j] = e[j] * w[j] + 0.5 * h * (e[j] * f0[j] + f1[j]);
            }
            t = t1;
        }
        t = stop;
        if snap_idx < snaps.len() && (snaps[snap_idx] - stop).abs() <= 1e-12 * cfg.t_final {
            times.push(stop);
            states.push(GridFunction {
                grid,
                values: sp.inverse(&w),
            });
            snap_idx += 1;
        }
    }
    Ok(GridTrajectory {
        times,
        states,
        steps: Vec::new(),
        weight_centers: Vec::new(),
    })
}
