//! Dispatch, provenance and artifact writing.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use sha2::{Digest, Sha256};

use super::spec::ExperimentSpec;
use super::studies::{lattice_report, locality_study, relax_study, simulate, steer_study};
use super::sweep::sweep_study;
use super::{CheckReport, HarnessError, StudyOutput};

/// Shipped experiments run by `verify`, with their file names.
pub const BATTERY: &[(&str, &str)] = &[
    ("simulate_cole_hopf", include_str!("../../specs/simulate_cole_hopf.json")),
    ("simulate_forced", include_str!("../../specs/simulate_forced.json")),
    ("lattice", include_str!("../../specs/lattice.json")),
    ("relax", include_str!("../../specs/relax.json")),
    ("sweep_cutoff", include_str!("../../specs/sweep_cutoff.json")),
    ("sweep_harmonics", include_str!("../../specs/sweep_harmonics.json")),
    ("steer", include_str!("../../specs/steer.json")),
    ("locality", include_str!("../../specs/locality.json")),
];

/// The parsed battery.
pub fn battery() -> Vec<(&'static str, ExperimentSpec)> {
    BATTERY
        .iter()
        .map(|(name, text)| (*name, parse_spec(text).expect("shipped specs parse")))
        .collect()
}

pub fn parse_spec(text: &str) -> Result<ExperimentSpec, HarnessError> {
    let spec: ExperimentSpec =
        serde_json::from_str(text).map_err(|e| HarnessError::ConfigParse(e.to_string()))?;
    spec.validate().map_err(HarnessError::ConfigParse)?;
    Ok(spec)
}

/// SHA-256 of the canonical JSON of the spec, in hex.
pub fn provenance(spec: &ExperimentSpec) -> String {
    let canonical = serde_json::to_string(spec).expect("specs serialize");
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub kind: &'static str,
    pub provenance: String,
    pub output: StudyOutput,
}

impl RunOutcome {
    pub fn checks(&self) -> &[CheckReport] {
        &self.output.checks
    }

    pub fn passed(&self) -> bool {
        self.output.checks.iter().all(|c| c.pass)
    }

    /// `0` when every check passes, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn report_json(&self) -> serde_json::Value {
        json!({
            "kind": self.kind,
            "provenance": self.provenance,
            "passed": self.passed(),
            "checks": self.output.checks,
            "data": self.output.data,
        })
    }
}

/// Runs one experiment in memory.
pub fn run(spec: &ExperimentSpec) -> Result<RunOutcome, HarnessError> {
    spec.validate().map_err(HarnessError::ConfigParse)?;
    let mut output = match spec {
        ExperimentSpec::Simulate(s) => simulate(s)?,
        ExperimentSpec::Steer(s) => steer_study(s)?,
        ExperimentSpec::RelaxStudy(s) => relax_study(s)?,
        ExperimentSpec::LocalityStudy(s) => locality_study(s)?,
        ExperimentSpec::LatticeReport(s) => lattice_report(s)?,
        ExperimentSpec::Sweep(s) => sweep_study(&s.sweep)?,
    };
    let provenance = provenance(spec);
    for c in &mut output.checks {
        c.provenance = provenance.clone();
    }
    Ok(RunOutcome {
        kind: spec.kind(),
        provenance,
        output,
    })
}

/// Writes `report.json` and every table into `dir`; returns the paths written.
///
/// All contents are rendered before the first file is created.
pub fn write_outcome(outcome: &RunOutcome, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut files = vec![(
        "report.json".to_string(),
        serde_json::to_string_pretty(&outcome.report_json()).expect("reports serialize") + "\n",
    )];
    for t in &outcome.output.tables {
        files.push((t.file.clone(), t.to_csv()?));
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = dir.join(name);
        fs::write(&path, contents)?;
        written.push(path);
    }
    Ok(written)
}

/// Reads, runs and writes; nothing is written when the spec does not parse.
pub fn run_file(
    path: &Path,
    out: &Path,
    seed: Option<u64>,
) -> Result<RunOutcome, HarnessError> {
    let text = fs::read_to_string(path)?;
    let mut spec = parse_spec(&text)?;
    if let Some(s) = seed {
        spec.set_seed(s);
    }
    let outcome = run(&spec)?;
    write_outcome(&outcome, out)?;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_parses() {
        let b = battery();
        assert_eq!(b.len(), BATTERY.len());
        for (name, spec) in &b {
            assert_eq!(provenance(spec).len(), 64, "{name}");
        }
    }

    #[test]
    fn malformed_spec() {
        assert!(matches!(parse_spec("{"), Err(HarnessError::ConfigParse(_))));
        assert!(matches!(
            parse_spec(r#"{"kind": "nope"}"#),
            Err(HarnessError::ConfigParse(_))
        ));
    }
}
