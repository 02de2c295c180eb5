use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::trig::TrigPoly;

/// Uniform periodic grid on `[-L, L)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub half_length: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(half_length: f64, n: usize) -> Result<Self, SolverError> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "half_length must be positive, got {half_length}"
            )));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(SolverError::InvalidConfig(format!(
                "n_grid must be a power of two >= 16, got {n}"
            )));
        }
        Ok(Self { half_length, n })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_length + i as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Smallest positive wavenumber `pi / L`.
    pub fn k0(&self) -> f64 {
        std::f64::consts::PI / self.half_length
    }
}

/// Samples of a real function at the nodes of a [`Grid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, SolverError> {
        if values.len() != grid.n {
            return Err(SolverError::GridMismatch {
                expected: grid.n,
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite { index: i });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid,
            values: grid.nodes().into_iter().map(f).collect(),
        }
    }

    pub fn from_trig(grid: Grid, p: &TrigPoly) -> Self {
        Self {
            grid,
            values: p.evaluate_many(&grid.nodes()),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        assert_eq!(self.grid, other.grid, "grid functions on different grids");
        GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

/// One record per accepted time step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub sup_u: f64,
    /// `(int w_y u^2, int w_y u_x^2)` for every weight center.
    pub weighted: Vec<(f64, f64)>,
}

/// Snapshots of a solution together with per-step diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<GridFunction>,
    /// Per-step diagnostics; the first entry is the initial state.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<StepRecord>,
    /// Centers `y` of the weighted norms stored in `steps`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weight_centers: Vec<f64>,
}

impl GridTrajectory {
    pub fn final_state(&self) -> &GridFunction {
        self.states.last().expect("trajectory has at least one state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one time")
    }

    pub fn grid(&self) -> Grid {
        self.states[0].grid
    }
}
