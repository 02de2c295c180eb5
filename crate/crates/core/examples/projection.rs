//! Reference control, spatial cutoff and projection onto lattice harmonics.

use burgers_lab::control::{
    fourier_project, resolve_params, spatial_cutoff, straight_line_control, Schedule, SteeringSpec,
};
use burgers_lab::solver::{l2_interval, Grid, GridFunction, Side};
use burgers_lab::trig::{FrequencyBasis, TrigPoly};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let b = FrequencyBasis::unit_sqrt2();
    let u0 = TrigPoly::sin(b, 1, 0, 0.3);
    let uhat = TrigPoly::cos(b, 0, 1, 0.2).add(&TrigPoly::sin(b, 1, 1, 0.1));
    let spec = SteeringSpec {
        u0: u0.clone(),
        uhat: uhat.clone(),
        t_final: 1.0,
        epsilon: 0.1,
        r: 2.0,
        mu: 0.5,
        h: None,
        knobs: Default::default(),
    };
    let p = resolve_params(&spec)?;
    println!(
        "cutoff n = {}, omega = {} (order {}), window L = {:.3}",
        p.n_cutoff,
        p.projection.omega,
        p.projection.omega.order(),
        p.half_length
    );

    let h = Schedule::constant(1.0, TrigPoly::zero(b));
    let eta = straight_line_control(&u0, &uhat, 1.0, &h, 0.5)?;
    println!("reference control: {} segments, lattice order {}", eta.segments.len(), eta.max_order());

    let grid = Grid::new(p.half_length, p.n_grid)?;
    let eta_n = spatial_cutoff(&eta, p.n_cutoff, &grid)?;
    let t = 0.5;
    let cut = eta_n.eval(t, Side::Right);
    for big_n in [4, 8, 16, 32, 64] {
        let proj = fourier_project(&eta_n, &p.projection.omega, big_n, &b)?;
        let approx = GridFunction::from_trig(grid, &proj.eval(t, Side::Right));
        let err = l2_interval(&approx.sub(&cut), -2.0, 2.0)?;
        println!(
            "N = {big_n:2}: |P eta_n - eta_n|_L2(-2,2) at t = {t} is {err:.3e}, max order {} <= {}",
            proj.max_order(),
            p.projection.image_order(big_n)
        );
    }
    Ok(())
}
