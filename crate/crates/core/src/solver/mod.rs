//! Pseudospectral solver for `u_t - mu (u + g)_xx + B(u + g) = f` on `[-L, L)`.

mod cole_hopf;
mod export;
mod forcing;
mod grid;
mod heat;
mod norms;
mod solve;
pub(crate) mod spectral;

use serde::{Deserialize, Serialize};

pub use cole_hopf::cole_hopf_solve;
pub use export::{trajectory_csv, trajectory_json, write_trajectory_csv};
pub use forcing::{sample, FnForcing, Forcing, NoForcing, SampledForcing, Sampler, Side, SumForcing};
pub use grid::{Grid, GridFunction, GridTrajectory, StepRecord};
pub use heat::{duhamel, heat_convolve};
pub use norms::{
    hs_interval, hs_ul, l2_interval, norm, periodic_weight, sup, trajectory_norm, weighted_l2,
    NormKind,
};
pub use solve::{edge_taper, solve, BLOWUP_THRESHOLD};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("grid function has {found} values, grid has {expected} nodes")]
    GridMismatch { expected: usize, found: usize },
    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },
    #[error("solution blew up at t = {t}: max |u| = {max}")]
    BlowUp { t: f64, max: f64 },
    #[error("CFL condition needs dt = {dt:e} at t = {t}, below the floor")]
    CflViolation { t: f64, dt: f64 },
    #[error("Cole-Hopf transform needs zero mean, got {mean:e}")]
    NonZeroMean { mean: f64 },
    #[error("Cole-Hopf potential lost positivity at t = {t}")]
    NonPositivePhi { t: f64 },
    #[error("interval [{a}, {b}] is not inside [-{half_length}, {half_length})")]
    IntervalOutOfWindow { a: f64, b: f64, half_length: f64 },
}

fn yes() -> bool {
    true
}

fn default_dt_floor() -> f64 {
    1e-8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub mu: f64,
    pub half_length: f64,
    pub n_grid: usize,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "yes")]
    pub dealias: bool,
    /// Steps of size `dt` between stored snapshots; `0` keeps only the endpoints.
    #[serde(default)]
    pub snapshot_stride: usize,
    #[serde(default = "default_dt_floor")]
    pub dt_floor: f64,
    /// Width of a smooth taper to zero at `x = +-L`, applied to the initial
    /// state and all forcing samples. Use it when trigonometric data is not
    /// periodic on the window.
    #[serde(default)]
    pub edge_taper: Option<f64>,
}

impl SolverConfig {
    pub fn new(mu: f64, half_length: f64, n_grid: usize, dt: f64, t_final: f64) -> Self {
        Self {
            mu,
            half_length,
            n_grid,
            dt,
            t_final,
            dealias: true,
            snapshot_stride: 0,
            dt_floor: default_dt_floor(),
            edge_taper: None,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn with_taper(mut self, width: f64) -> Self {
        self.edge_taper = Some(width);
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::InvalidConfig(m));
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("t_final must be positive, got {}", self.t_final));
        }
        if !(self.dt > 0.0 && self.dt <= self.t_final) {
            return bad(format!("need 0 < dt <= t_final, got dt = {}", self.dt));
        }
        if let Some(w) = self.edge_taper {
            if !(w > 0.0 && w < self.half_length) {
                return bad(format!("edge taper width {w} must lie in (0, L)"));
            }
        }
        Grid::new(self.half_length, self.n_grid)?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, SolverError> {
        Grid::new(self.half_length, self.n_grid)
    }

    /// Times at which snapshots are stored, from `0` to `t_final`.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let t = self.t_final;
        let mut out = vec![0.0];
        if self.snapshot_stride > 0 {
            let every = self.snapshot_stride as f64 * self.dt;
            let mut j = 1.0;
            while j * every < t * (1.0 - 1e-12) {
                out.push(j * every);
                j += 1.0;
            }
        }
        out.push(t);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation_and_serde() {
        let cfg = SolverConfig::new(0.1, 3.0, 64, 0.01, 1.0);
        cfg.validate().unwrap();
        assert!(SolverConfig { mu: 0.0, ..cfg.clone() }.validate().is_err());
        assert!(SolverConfig { dt: 2.0, ..cfg.clone() }.validate().is_err());
        assert!(SolverConfig { n_grid: 100, ..cfg.clone() }.validate().is_err());
        let json = r#"{"mu":0.1,"half_length":3.0,"n_grid":64,"dt":0.01,"t_final":1.0}"#;
        let parsed: SolverConfig = serde_json::from_str(json).unwrap();
        assert_eq!(parsed, cfg);
        assert!(serde_json::from_str::<SolverConfig>(r#"{"mu":0.1}"#).is_err());
    }

    #[test]
    fn snapshot_grid() {
        let cfg = SolverConfig::new(0.1, 3.0, 64, 0.1, 1.0);
        assert_eq!(cfg.snapshot_times(), vec![0.0, 1.0]);
        let s = cfg.clone().with_stride(3).snapshot_times();
        assert_eq!(s.len(), 5);
        assert!((s[3] - 0.9).abs() < 1e-12);
        assert_eq!(*s.last().unwrap(), 1.0);
    }
}
