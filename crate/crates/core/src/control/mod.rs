//! Construction of low-mode controls: reference control, cutoff, projection,
//! relaxation and the steering pipeline that chains them.

mod projection;
mod reference;
mod relax;
mod schedule;
mod steer;

pub use projection::{
    choose_projection_params, fourier_project, project_field, ProjectionParams, MAX_SEARCH_ORDER,
};
pub use reference::{spatial_cutoff, straight_line_control, straight_line_residual};
pub use relax::{
    absorb_zeta, averaged_forcing, default_theta, mollified_value, RAMP_STEPS, relax_level,
    OscillationInterval, OscillationSchedule, Piece, RelaxedLevel,
};
pub use schedule::{
    ControlSchedule, Field, GriddedSchedule, SampledSchedule, Schedule, Segment, Smoothness, Term,
    TimeProfile,
};
pub use steer::{
    interval_errors, resolve_params, steer, ResolvedParams, StageRecord, SteeringKnobs, SteeringResult,
    SteeringSpec,
};

use crate::solver::SolverError;
use crate::trig::TrigError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ControlError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("cutoff radius {n} needs 2n <= L = {half_length}")]
    WindowTooSmall { n: u64, half_length: f64 },
    #[error("projection half-period {half_period} exceeds the window half-length {half_length}")]
    WindowMismatch { half_period: f64, half_length: f64 },
    #[error("no lattice frequency below {bound} up to the search order")]
    NoProjectionFrequency { bound: f64 },
    #[error("quantization needs at least one interval, got {0}")]
    QuantizationTooCoarse(usize),
    #[error("relaxation needs a piecewise-constant control")]
    NotPiecewiseConstant,
    #[error("ramp width {theta} too wide for {switches} switches on [0, {horizon}]")]
    RampTooWide { theta: f64, switches: usize, horizon: f64 },
    #[error("invalid steering spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Trig(#[from] TrigError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("stage {stage} failed: {source}")]
    StageFailure {
        stage: String,
        #[source]
        source: Box<ControlError>,
    },
}
