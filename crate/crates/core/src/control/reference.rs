//! Straight-line reference control and its spatial cutoff.

use super::schedule::{ControlSchedule, GriddedSchedule, Schedule};
use super::ControlError;
use crate::smooth::cutoff;
use crate::solver::{Grid, GridFunction, Side};
use crate::trig::TrigPoly;

/// Control that makes `u(t) = u0 + (t/T)(uhat - u0)` an exact solution of
/// `u_t - mu u_xx + B(u) = h + eta`.
///
/// With `d = (uhat - u0) / T` the control is quadratic in `t`:
/// `eta = [d - mu u0'' + B(u0)] + t [-mu d'' + u0 d' + d u0'] + t^2 B(d) - h`.
pub fn straight_line_control(
    u0: &TrigPoly,
    uhat: &TrigPoly,
    horizon: f64,
    h: &ControlSchedule,
    mu: f64,
) -> Result<ControlSchedule, ControlError> {
    if !(horizon > 0.0) {
        return Err(ControlError::InvalidSchedule("horizon must be positive".into()));
    }
    let d = uhat.sub(u0).scale(1.0 / horizon);
    let c0 = d
        .sub(&u0.nth_derivative(2).scale(mu))
        .add(&u0.burgers());
    let c1 = d
        .nth_derivative(2)
        .scale(-mu)
        .add(&u0.multiply(&d.derivative()))
        .add(&d.multiply(&u0.derivative()));
    let c2 = d.burgers();
    let base = Schedule::polynomial(horizon, vec![c0, c1, c2]);
    Ok(base.add(&h.scale(-1.0)))
}

/// `u_t - mu u_xx + B(u) - h - eta` at time `t` along the straight line.
pub fn straight_line_residual(
    u0: &TrigPoly,
    uhat: &TrigPoly,
    horizon: f64,
    h: &ControlSchedule,
    mu: f64,
    eta: &ControlSchedule,
    t: f64,
) -> TrigPoly {
    let d = uhat.sub(u0).scale(1.0 / horizon);
    let u = u0.add(&d.scale(t));
    d.sub(&u.nth_derivative(2).scale(mu))
        .add(&u.burgers())
        .sub(&h.eval(t, Side::Right))
        .sub(&eta.eval(t, Side::Right))
}

/// `eta_n(t, x) = chi(x / n) eta(t, x)`, supported in `|x| <= 2n`.
pub fn spatial_cutoff(
    eta: &ControlSchedule,
    n: u64,
    grid: &Grid,
) -> Result<GriddedSchedule, ControlError> {
    if n == 0 || 2.0 * n as f64 > grid.half_length {
        return Err(ControlError::WindowTooSmall {
            n,
            half_length: grid.half_length,
        });
    }
    let chi: Vec<f64> = grid.nodes().iter().map(|x| cutoff(x / n as f64)).collect();
    Ok(eta.map(|p| {
        let values = p
            .evaluate_many(&grid.nodes())
            .iter()
            .zip(&chi)
            .map(|(v, c)| v * c)
            .collect();
        GridFunction { grid: *grid, values }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig::FrequencyBasis;

    fn b() -> FrequencyBasis {
        FrequencyBasis::unit_sqrt2()
    }

    fn zero_h() -> ControlSchedule {
        Schedule::constant(1.0, TrigPoly::zero(b()))
    }

    #[test]
    fn stationary_target() {
        let mu = 0.3;
        let u0 = TrigPoly::sin(b(), 1, 0, 0.4).add(&TrigPoly::cos(b(), 0, 1, -0.2));
        let eta = straight_line_control(&u0, &u0, 1.0, &zero_h(), mu).unwrap();
        let want = u0.nth_derivative(2).scale(-mu).add(&u0.burgers());
        for t in [0.0, 0.3, 1.0] {
            assert!(eta.eval(t, Side::Right).approx_eq(&want, 1e-15));
        }
    }

    #[test]
    fn sine_target_closed_form() {
        let (a, mu) = (0.7, 0.2);
        let uhat = TrigPoly::sin(b(), 1, 0, a);
        let eta = straight_line_control(&TrigPoly::zero(b()), &uhat, 1.0, &zero_h(), mu).unwrap();
        for t in [0.0, 0.25, 0.8] {
            let want = TrigPoly::sin(b(), 1, 0, a * (1.0 + mu * t))
                .add(&TrigPoly::sin(b(), 2, 0, a * a * t * t / 2.0));
            assert!(eta.eval(t, Side::Right).approx_eq(&want, 1e-15));
        }
    }

    #[test]
    fn residual_vanishes() {
        let mu = 0.5;
        let u0 = TrigPoly::sin(b(), 0, 1, 0.3).add(&TrigPoly::constant(b(), 0.1));
        let uhat = TrigPoly::cos(b(), 1, 1, -0.2).add(&TrigPoly::sin(b(), 1, 0, 0.3));
        let h = Schedule::constant(2.0, TrigPoly::cos(b(), 2, 0, 0.05));
        let eta = straight_line_control(&u0, &uhat, 2.0, &h, mu).unwrap();
        for t in [0.0, 0.7, 1.3, 2.0] {
            let r = straight_line_residual(&u0, &uhat, 2.0, &h, mu, &eta, t);
            assert!(r.max_coefficient() < 1e-15, "{r:?}");
        }
    }

    #[test]
    fn cutoff_support() {
        let grid = Grid::new(8.0, 256).unwrap();
        let one = Schedule::constant(1.0, TrigPoly::constant(b(), 1.0));
        let cut = spatial_cutoff(&one, 2, &grid).unwrap();
        let v = &cut.segments[0].terms[0].field;
        for (x, y) in grid.nodes().iter().zip(&v.values) {
            if x.abs() <= 2.0 {
                assert_eq!(*y, 1.0);
            }
            if x.abs() >= 4.0 {
                assert_eq!(*y, 0.0);
            }
        }
        assert!(matches!(
            spatial_cutoff(&one, 5, &grid),
            Err(ControlError::WindowTooSmall { .. })
        ));
    }
}
