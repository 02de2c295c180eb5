//! JSON experiment descriptions. Every tolerance lives here with a shipped default.

use serde::{Deserialize, Serialize};

use super::checks::AprioriTolerances;
use crate::control::SteeringSpec;
use crate::solver::SolverConfig;
use crate::trig::{FrequencyBasis, TrigPoly};

pub const DEFAULT_SEED: u64 = 0x5EED;

/// One experiment, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentSpec {
    Simulate(SimulateSpec),
    Steer(SteerStudy),
    RelaxStudy(RelaxStudy),
    LocalityStudy(LocalityStudy),
    LatticeReport(LatticeReportSpec),
    Sweep(SweepExperiment),
}

impl ExperimentSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentSpec::Simulate(_) => "simulate",
            ExperimentSpec::Steer(_) => "steer",
            ExperimentSpec::RelaxStudy(_) => "relax_study",
            ExperimentSpec::LocalityStudy(_) => "locality_study",
            ExperimentSpec::LatticeReport(_) => "lattice_report",
            ExperimentSpec::Sweep(_) => "sweep",
        }
    }

    /// Replaces the perturbation seed where the experiment has one.
    pub fn set_seed(&mut self, seed: u64) {
        if let ExperimentSpec::LocalityStudy(l) = self {
            l.rng_seed = seed;
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let nonempty = |name: &str, n: usize| {
            if n == 0 {
                Err(format!("sweep axis `{name}` is empty"))
            } else {
                Ok(())
            }
        };
        match self {
            ExperimentSpec::RelaxStudy(r) => nonempty("m_values", r.m_values.len()),
            ExperimentSpec::LocalityStudy(l) => nonempty("rho_fractions", l.rho_fractions.len()),
            ExperimentSpec::Sweep(s) => nonempty("values", s.sweep.len()),
            _ => Ok(()),
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub solver: SolverConfig,
    pub u0: TrigPoly,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<TrigPoly>,
    /// `f` is switched off from this time on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_until: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<TrigPoly>,
    /// Compare with the Cole-Hopf solution (unforced runs only).
    #[serde(default)]
    pub cole_hopf: bool,
    #[serde(default)]
    pub tolerances: SimulateTolerances,
    /// Write every snapshot to `trajectory.csv`.
    #[serde(default = "yes")]
    pub snapshots: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateTolerances {
    /// Sup-norm distance to the Cole-Hopf solution at `T`.
    pub cole_hopf: f64,
    pub apriori: AprioriTolerances,
}

impl Default for SimulateTolerances {
    fn default() -> Self {
        Self {
            cole_hopf: 1e-6,
            apriori: AprioriTolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteerStudy {
    pub steering: SteeringSpec,
    /// Extra radii for the check that `|u(T)|_inf` does not depend on `r`.
    #[serde(default)]
    pub r_values: Vec<f64>,
    #[serde(default)]
    pub tolerances: SteerTolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteerTolerances {
    /// `(max - min) / max` of the terminal sup norm across `r_values`.
    pub k_variation: f64,
}

impl Default for SteerTolerances {
    fn default() -> Self {
        Self {
            k_variation: 0.05,
        }
    }
}

fn default_m_values() -> Vec<usize> {
    vec![8, 16, 32, 64, 128]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxStudy {
    pub solver: SolverConfig,
    pub u0: TrigPoly,
    /// Time-independent `F(N, G)`-valued control.
    pub eta: TrigPoly,
    pub nu: f64,
    #[serde(default = "default_m_values")]
    pub m_values: Vec<usize>,
    /// Errors are measured in `H^1(-r, r)`.
    pub r: f64,
    #[serde(default)]
    pub tolerances: RelaxTolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionStudy>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelaxTolerances {
    /// `e(m_check) < ratio * e(m_first)`.
    pub ratio: f64,
    pub m_check: usize,
    /// Steps per dwell: `dt <= alpha_min |J| / (steps_per_dwell m)`.
    pub steps_per_dwell: f64,
}

impl Default for RelaxTolerances {
    fn default() -> Self {
        Self {
            ratio: 0.5,
            m_check: 64,
            steps_per_dwell: 10.0,
        }
    }
}

/// Absorbed control against the shifted equation, refining `theta` and `dt` together.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtensionStudy {
    pub m: usize,
    /// Number of runs; each halves `theta` and `dt`.
    pub levels: usize,
    /// Initial ramp width; defaults to `T / (40 switches)`.
    pub theta: Option<f64>,
    pub ramp_steps: f64,
    /// `e(h / 2) <= ratio * e(h)` at every refinement.
    pub ratio: f64,
    /// `L2` mismatch against the shifted equation driven by the mollified `zeta`.
    pub round_trip: f64,
}

impl Default for ExtensionStudy {
    fn default() -> Self {
        Self {
            m: 8,
            levels: 3,
            theta: None,
            ramp_steps: 2.0 * crate::control::RAMP_STEPS,
            ratio: 0.55,
            round_trip: 1e-4,
        }
    }
}

fn default_rho_fractions() -> Vec<f64> {
    vec![0.125, 0.25, 0.5]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalityStudy {
    pub solver: SolverConfig,
    pub u0: TrigPoly,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<TrigPoly>,
    /// Sup norm of each perturbation.
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Number of random modes per perturbation.
    #[serde(default = "four")]
    pub modes: usize,
    /// `rho` as fractions of the half-length `L`.
    #[serde(default = "default_rho_fractions")]
    pub rho_fractions: Vec<f64>,
    /// Width of the smooth edge of the perturbation mask.
    #[serde(default = "one")]
    pub edge: f64,
    pub r: f64,
    #[serde(default = "default_seed")]
    pub rng_seed: u64,
    #[serde(default)]
    pub tolerances: LocalityTolerances,
}

fn one() -> f64 {
    1.0
}

fn four() -> usize {
    4
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalityTolerances {
    /// Bound `delta` on the effect at the largest `rho`.
    pub delta: f64,
    /// Absolute slack of the monotonicity checks.
    pub monotone_slack: f64,
}

impl Default for LocalityTolerances {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            monotone_slack: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeReportSpec {
    #[serde(default = "FrequencyBasis::unit_sqrt2")]
    pub basis: FrequencyBasis,
    pub k: u64,
    /// Check the largest gap of `Lambda_k` inside `[0, gap_window]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_window: Option<f64>,
    #[serde(default = "default_gap")]
    pub gap_bound: f64,
    /// Check that `j` span iterations from the control space contain `Lambda_j`, `j <= span_depth`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span_depth: Option<u64>,
    /// Check the lifting identities for every admissible frequency of this order or less.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturation_order: Option<u64>,
    #[serde(default = "default_residual")]
    pub residual_tol: f64,
}

fn default_gap() -> f64 {
    0.1
}

fn default_residual() -> f64 {
    1e-13
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepExperiment {
    pub sweep: SweepSpec,
}

/// One sweep axis with its base problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis")]
pub enum SweepSpec {
    /// `|eta_n - eta|` in `L2(J x I_rho)`.
    #[serde(rename = "n")]
    Cutoff {
        steering: SteeringSpec,
        rho: f64,
        values: Vec<u64>,
    },
    /// `|P eta_n - eta_n|` in `L2(J x I_rho)`.
    #[serde(rename = "N")]
    Harmonics {
        steering: SteeringSpec,
        rho: f64,
        values: Vec<usize>,
    },
    /// `|u^m(T) - u~(T)|` in `H^1(-r, r)`.
    #[serde(rename = "m")]
    Oscillation { study: RelaxStudy, values: Vec<usize> },
    /// Sup distance to Cole-Hopf at `T`.
    #[serde(rename = "n_grid")]
    GridSize { simulate: SimulateSpec, values: Vec<usize> },
    #[serde(rename = "dt")]
    TimeStep { simulate: SimulateSpec, values: Vec<f64> },
}

impl SweepSpec {
    pub fn axis(&self) -> &'static str {
        match self {
            SweepSpec::Cutoff { .. } => "n",
            SweepSpec::Harmonics { .. } => "N",
            SweepSpec::Oscillation { .. } => "m",
            SweepSpec::GridSize { .. } => "n_grid",
            SweepSpec::TimeStep { .. } => "dt",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SweepSpec::Cutoff { values, .. } => values.len(),
            SweepSpec::Harmonics { values, .. } => values.len(),
            SweepSpec::Oscillation { values, .. } => values.len(),
            SweepSpec::GridSize { values, .. } => values.len(),
            SweepSpec::TimeStep { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
