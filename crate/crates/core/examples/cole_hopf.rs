//! Unforced solve compared with the exact Cole-Hopf solution.

use std::f64::consts::PI;

use burgers_lab::solver::{cole_hopf_solve, solve, GridFunction, NoForcing, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in [32, 64, 128, 256] {
        let cfg = SolverConfig::new(0.1, PI, n, 1e-3, 1.0);
        let u0 = GridFunction::from_fn(cfg.grid()?, |x| 0.5 * x.sin());
        let run = solve(&u0, &NoForcing, None, &cfg)?;
        let exact = cole_hopf_solve(&u0, &cfg)?;
        let err = run.final_state().sub(exact.final_state()).sup();
        println!("n_grid = {n:4}  steps = {:5}  sup error = {err:.3e}", run.steps.len() - 1);
    }
    Ok(())
}
