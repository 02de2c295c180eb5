use std::path::{Path, PathBuf};
use std::process::ExitCode;

use burgers_lab::harness::{
    battery, parse_spec, run, write_outcome, ExperimentSpec, HarnessError, RunOutcome, BATTERY,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "burgers-lab", version, about = "Burgers control experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment spec (JSON); the shipped default for the subcommand when omitted.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for perturbation studies.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print only the summary line.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy, PartialEq)]
enum Command {
    /// Solve one forced Burgers problem and check the a priori bounds.
    Simulate,
    /// Run the steering pipeline.
    Steer,
    /// Averaging and extension study.
    Relax,
    /// Lattice enumeration and saturation checks.
    Lattice,
    /// One-axis convergence sweep.
    Sweep,
    /// Run a spec of any kind, or the whole shipped battery.
    Verify,
}

impl Command {
    fn kinds(self) -> (&'static [&'static str], &'static str) {
        match self {
            Command::Simulate => (&["simulate"], "simulate_cole_hopf"),
            Command::Steer => (&["steer"], "steer"),
            Command::Relax => (&["relax_study"], "relax"),
            Command::Lattice => (&["lattice_report"], "lattice"),
            Command::Sweep => (&["sweep"], "sweep_harmonics"),
            Command::Verify => (&[], ""),
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentSpec, HarnessError> {
    let (kinds, default) = cli.command.kinds();
    let mut spec = match &cli.spec {
        Some(p) => parse_spec(&std::fs::read_to_string(p)?)?,
        None => {
            let text = BATTERY.iter().find(|(n, _)| *n == default).map(|b| b.1);
            parse_spec(text.expect("every subcommand has a shipped spec"))?
        }
    };
    if !kinds.is_empty() && !kinds.contains(&spec.kind()) {
        return Err(HarnessError::ConfigParse(format!(
            "expected kind {:?}, found {:?}",
            kinds[0],
            spec.kind()
        )));
    }
    if let Some(s) = cli.seed {
        spec.set_seed(s);
    }
    Ok(spec)
}

fn execute(name: &str, spec: &ExperimentSpec, out: &Path, quiet: bool) -> Result<RunOutcome, HarnessError> {
    let outcome = run(spec)?;
    write_outcome(&outcome, out)?;
    if !quiet {
        for c in outcome.checks() {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            println!("{tag} {name}/{}: {:.6e} vs {:.6e} (+{:.1e})", c.name, c.lhs, c.rhs, c.slack);
        }
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = if cli.command == Command::Verify && cli.spec.is_none() {
        let mut all = true;
        let mut err = None;
        for (name, mut spec) in battery() {
            if let Some(s) = cli.seed {
                spec.set_seed(s);
            }
            match execute(name, &spec, &cli.out.join(name), cli.quiet) {
                Ok(o) => all &= o.passed(),
                Err(e) => {
                    eprintln!("error in {name}: {e}");
                    err = Some(e);
                }
            }
        }
        match err {
            Some(e) => Err(e),
            None => Ok(all),
        }
    } else {
        load(&cli).and_then(|spec| execute(spec.kind(), &spec, &cli.out, cli.quiet).map(|o| o.passed()))
    };
    match result {
        Ok(true) => {
            println!("all checks passed");
            ExitCode::SUCCESS
        }
        Ok(false) => {
            println!("some checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
