//! Lattice frequencies, the convexification span and the lifting identities.

use burgers_lab::harness::max_gap;
use burgers_lab::trig::{
    convexification_span, enumerate_lattice, make_control_space, make_frequency,
    saturation_decompose, standard_generators, FrequencyBasis,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let basis = FrequencyBasis::unit_sqrt2();
    let gens = standard_generators(&basis);
    let mut g = make_control_space(&basis);
    println!("control space: {} frequencies, dimension {}", g.len(), g.dimension());
    for k in 1..=5 {
        g = convexification_span(&gens, &g)?;
        let lam = enumerate_lattice(k, &basis);
        println!(
            "after {k} span steps: {:3} frequencies, contains order-{k} ball ({}): {}",
            g.len(),
            lam.len(),
            lam.is_subset(&g)
        );
    }

    for k in [5, 10, 20, 30] {
        let values: Vec<f64> = enumerate_lattice(k, &basis).iter().map(|f| f.value()).collect();
        println!("order <= {k:2}: largest gap in [0, 5] = {:.4}", max_gap(&values, 5.0));
    }

    let lambda = make_frequency(2, 1, &basis)?;
    let id = saturation_decompose(&lambda, &basis)?;
    println!("\nlifting {lambda} through shift {:?}", id.shift_coords());
    for (name, term, res) in [
        ("sin", &id.sine, id.sine_residual(&basis)),
        ("cos", &id.cosine, id.cosine_residual(&basis)),
    ] {
        println!(
            "  {name}: eta of order {}, xi of order {}, xi~ of order {}, residual {:.1e}",
            term.eta.max_order(),
            term.xi.max_order(),
            term.xi_tilde.max_order(),
            res.max_coefficient()
        );
    }
    Ok(())
}
