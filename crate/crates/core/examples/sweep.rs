//! Convergence sweeps driven by JSON, as the CLI runs them.

use burgers_lab::harness::{convergence_sweep, parse_spec, ExperimentSpec, BATTERY};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["sweep_cutoff", "sweep_harmonics"] {
        let text = BATTERY.iter().find(|(n, _)| *n == name).expect("shipped").1;
        let ExperimentSpec::Sweep(s) = parse_spec(text)? else {
            unreachable!()
        };
        let (table, checks) = convergence_sweep(&s.sweep)?;
        println!("axis {} (monotone tail: {})", table.axis, table.monotone);
        for r in &table.rows {
            println!("  {:6} {:.4e}", r.value, r.error);
        }
        for c in checks {
            println!("  {} {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
        }
    }
    Ok(())
}
