use rustfft::num_complex::Complex64;

use super::grid::{GridFunction, GridTrajectory};
use super::spectral::Spectral;
use super::{SolverConfig, SolverError};

/// Exact solution of the unforced equation through `u = -2 mu phi_x / phi`,
/// with `phi` propagated by the spectral heat semigroup.
pub fn cole_hopf_solve(u0: &GridFunction, cfg: &SolverConfig) -> Result<GridTrajectory, SolverError> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    if u0.grid != grid {
        return Err(SolverError::InvalidConfig(
            "initial state lives on a different grid".into(),
        ));
    }
    let mean = u0.mean();
    if mean.abs() > 1e-10 * u0.sup() {
        return Err(SolverError::NonZeroMean { mean });
    }
    let sp = Spectral::new(grid);
    let n = grid.n;
    let mu = cfg.mu;

    let mut uh = sp.forward(&u0.values);
    for (j, c) in uh.iter_mut().enumerate() {
        *c = if j == 0 || j == n / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            *c / Complex64::new(0.0, sp.k[j])
        };
    }
    let antiderivative = sp.inverse(&uh);
    let exponent: Vec<f64> = antiderivative.iter().map(|v| -v / (2.0 * mu)).collect();
    let top = exponent.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    let phi0: Vec<f64> = exponent.iter().map(|e| (e - top).exp()).collect();
    let phi0h = sp.forward(&phi0);

    let times = cfg.snapshot_times();
    let mut states = Vec::with_capacity(times.len());
    for &t in &times {
        if t == 0.0 {
            states.push(u0.clone());
            continue;
        }
        let e = sp.heat_factor(mu, t);
        let ph: Vec<Complex64> = phi0h.iter().zip(&e).map(|(c, e)| c * e).collect();
        let phi = sp.inverse(&ph);
        if phi.iter().any(|p| !(*p > 0.0)) {
            return Err(SolverError::NonPositivePhi { t });
        }
        let mut dph = ph;
        sp.differentiate(&mut dph, 1);
        let phi_x = sp.inverse(&dph);
        let values = phi.iter().zip(&phi_x).map(|(p, d)| -2.0 * mu * d / p).collect();
        states.push(GridFunction { grid, values });
    }
    Ok(GridTrajectory {
        times,
        states,
        steps: Vec::new(),
        weight_centers: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_and_mean_checks() {
        let cfg = SolverConfig::new(0.1, PI, 64, 0.01, 1.0).with_stride(20);
        let g = cfg.grid().unwrap();
        let z = cole_hopf_solve(&GridFunction::zeros(g), &cfg).unwrap();
        assert!(z.states.iter().all(|s| s.sup() == 0.0));
        let shifted = GridFunction::from_fn(g, |x| x.sin() + 0.01);
        assert!(matches!(
            cole_hopf_solve(&shifted, &cfg),
            Err(SolverError::NonZeroMean { .. })
        ));
    }

    #[test]
    fn linear_regime_and_mean() {
        let cfg = SolverConfig::new(0.1, PI, 64, 0.01, 1.0).with_stride(10);
        let a = 1e-4;
        let u0 = GridFunction::from_fn(cfg.grid().unwrap(), |x| a * x.sin());
        let tr = cole_hopf_solve(&u0, &cfg).unwrap();
        for (t, s) in tr.times.iter().zip(&tr.states) {
            let lin = GridFunction::from_fn(s.grid, |x| a * (-0.1 * t).exp() * x.sin());
            assert!(s.sub(&lin).sup() < 1e-4 * a);
            assert!(s.mean().abs() < 1e-10);
        }
    }
}
