//! The full steering pipeline with its per-stage ledger.

use burgers_lab::control::{steer, SteeringSpec};
use burgers_lab::trig::{FrequencyBasis, TrigPoly};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let b = FrequencyBasis::unit_sqrt2();
    let mut spec = SteeringSpec {
        u0: TrigPoly::sin(b, 1, 0, 0.3),
        uhat: TrigPoly::cos(b, 0, 1, 0.2).add(&TrigPoly::sin(b, 1, 1, 0.1)),
        t_final: 1.0,
        epsilon: 0.1,
        r: 2.0,
        mu: 0.5,
        h: None,
        knobs: Default::default(),
    };
    if let Some(d) = std::env::args().nth(1) {
        spec.knobs.depth = d.parse()?;
    }
    let res = steer(&spec)?;
    println!("K = {:.2}, N = {}, image order {}", res.params.k_bound, res.params.harmonics, res.params.image_order);
    println!("{:<14} {:>12} {:>12} {:>10}", "stage", "L2 error", "sup error", "|u(T)|");
    for s in &res.stages {
        println!("{:<14} {:12.4e} {:12.4e} {:10.4}", s.stage, s.l2_error, s.sup_error, s.sup_norm);
    }
    println!("targets met: {}", res.targets_met());
    Ok(())
}
