//! Far-field perturbations barely reach the observation interval.

use burgers_lab::harness::{battery, locality_effects, ExperimentSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let Some((_, ExperimentSpec::LocalityStudy(mut study))) =
        battery().into_iter().find(|(n, _)| *n == "locality")
    else {
        unreachable!("the locality spec ships with the crate")
    };
    if let Some(seed) = std::env::args().nth(1) {
        study.rng_seed = seed.parse()?;
    }
    println!("seed {:#x}, observed on [-{}, {}]", study.rng_seed, study.r, study.r);
    for (rho, effect) in locality_effects(&study)? {
        println!("perturbed beyond |x| > {rho:7.3}: sup_t |du|_L2 = {effect:.3e}");
    }
    Ok(())
}
