//! Fast oscillating controls: averaging in m and the extension identity.

use burgers_lab::harness::{averaging_errors, battery, extension_errors, ExperimentSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let Some((_, ExperimentSpec::RelaxStudy(study))) =
        battery().into_iter().find(|(n, _)| *n == "relax")
    else {
        unreachable!("the relax spec ships with the crate")
    };
    println!("eta = {} terms, nu = {}", study.eta.len(), study.nu);
    println!("{:>5} {:>10} {:>12} {:>12}", "m", "dt", "L2 error", "H1 error");
    for row in averaging_errors(&study, &[4, 8, 16, 32, 64, 128])? {
        println!("{:5} {:10.2e} {:12.4e} {:12.4e}", row.m, row.dt, row.l2, row.h1);
    }

    let (rows, round_trip) = extension_errors(&study)?;
    println!("\nabsorbed control vs shifted equation:");
    for (theta, dt, e) in &rows {
        println!("  theta = {theta:.3e}  dt = {dt:.3e}  L2 error = {e:.4e}");
    }
    println!("mollified round trip: {round_trip:.3e}");
    Ok(())
}
