//! Experiment runner: JSON specs in, check reports and CSV tables out.

mod checks;
pub mod rng;
mod run;
mod spec;
mod studies;
mod sweep;

use thiserror::Error;

pub use checks::{apriori_checks, check_targets, AprioriTolerances, CheckReport};
pub use run::{
    battery, parse_spec, provenance, run, run_file, write_outcome, RunOutcome, BATTERY,
};
pub use spec::{
    ExperimentSpec, ExtensionStudy, LatticeReportSpec, LocalityStudy, LocalityTolerances,
    RelaxStudy, RelaxTolerances, SimulateSpec, SimulateTolerances, SteerStudy, SteerTolerances,
    SweepExperiment, SweepSpec, DEFAULT_SEED,
};
pub use studies::{
    averaging_errors, extension_errors, lattice_report, locality_effects, locality_study,
    max_gap, relax_study, simulate, steer_study, AveragingRow,
};
pub use sweep::{convergence_sweep, monotone_tail, sweep_study, SweepRow, SweepTable};

use crate::control::ControlError;
use crate::solver::SolverError;
use crate::trig::TrigError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment spec: {0}")]
    ConfigParse(String),
    #[error("stage failed: {0}")]
    StageFailure(#[from] ControlError),
    #[error("solver failed: {0}")]
    Solver(#[from] SolverError),
    #[error("lattice algebra failed: {0}")]
    Trig(#[from] TrigError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// A CSV artifact: header plus string cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Pre-rendered contents, used as is when set.
    pub raw: Option<String>,
}

impl Table {
    pub fn new(file: impl Into<String>, header: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        Self {
            file: file.into(),
            header,
            rows,
            raw: None,
        }
    }

    pub fn raw(file: impl Into<String>, contents: String) -> Self {
        Self {
            file: file.into(),
            header: Vec::new(),
            rows: Vec::new(),
            raw: Some(contents),
        }
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        if let Some(r) = &self.raw {
            return Ok(r.clone());
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// What one experiment measured.
#[derive(Clone, Debug)]
pub struct StudyOutput {
    pub checks: Vec<CheckReport>,
    pub data: serde_json::Value,
    pub tables: Vec<Table>,
}
