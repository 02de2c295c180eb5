//! Truncated Fourier projection onto multiples of a small lattice frequency.

use serde::Serialize;

use super::schedule::{ControlSchedule, GriddedSchedule};
use super::ControlError;
use crate::solver::{Grid, GridFunction};
use crate::trig::{Coeffs, FrequencyBasis, LatticeFrequency, TrigPoly};

/// Largest lattice order searched for the projection frequency.
pub const MAX_SEARCH_ORDER: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProjectionParams {
    pub omega: LatticeFrequency,
    /// Lattice order of `omega`.
    pub order: u64,
    /// `pi / max(2n, rho)`; `omega` lies strictly below it.
    pub bound: f64,
}

impl ProjectionParams {
    /// Order bound of the image of the projection with `big_n` harmonics.
    pub fn image_order(&self, big_n: usize) -> u64 {
        big_n as u64 * self.order
    }

    /// Half-period `pi / omega` of the projection window.
    pub fn half_period(&self) -> f64 {
        std::f64::consts::PI / self.omega.value()
    }

    /// Window half-length `q pi / omega`, so projected controls are periodic.
    pub fn snapped_half_length(&self, q: usize) -> f64 {
        q as f64 * self.half_period()
    }
}

/// The lattice frequency of least order in `(0, pi / max(2n, rho))`, smaller
/// values first among equal orders.
pub fn choose_projection_params(
    n: u64,
    rho: f64,
    basis: &FrequencyBasis,
) -> Result<ProjectionParams, ControlError> {
    let bound = std::f64::consts::PI / (2.0 * n as f64).max(rho);
    for order in 1..=MAX_SEARCH_ORDER as i64 {
        let mut best: Option<LatticeFrequency> = None;
        for n1 in -order..=order {
            let rest = order - n1.abs();
            for n2 in [-rest, rest] {
                let v = basis.value(n1, n2);
                if v > 0.0 && v < bound && best.is_none_or(|b| v < b.value()) {
                    best = Some(basis.fold(n1, n2).0);
                }
                if rest == 0 {
                    break;
                }
            }
        }
        if let Some(omega) = best {
            return Ok(ProjectionParams {
                omega,
                order: order as u64,
                bound,
            });
        }
    }
    Err(ControlError::NoProjectionFrequency { bound })
}

/// `int_{-a}^{a} v` by the trapezoid rule on the grid, with partial end cells.
fn trapezoid_window(grid: &Grid, values: &[f64], a: f64) -> f64 {
    let l = grid.half_length;
    let h = grid.dx();
    let n = grid.n;
    let at = |x: f64| {
        let s = (x + l) / h;
        let j = s.floor();
        let w = s - j;
        let j = j as i64;
        let v = |k: i64| values[k.rem_euclid(n as i64) as usize];
        (1.0 - w) * v(j) + w * v(j + 1)
    };
    let ja = ((-a + l) / h - 1e-9).ceil() as i64;
    let jb = ((a + l) / h + 1e-9).floor() as i64;
    let v = |k: i64| values[k.rem_euclid(n as i64) as usize];
    let xa = -l + ja as f64 * h;
    let xb = -l + jb as f64 * h;
    let mut total = 0.5 * (at(-a) + v(ja)) * (xa + a).max(0.0);
    total += 0.5 * (v(jb) + at(a)) * (a - xb).max(0.0);
    for j in ja..jb {
        total += 0.5 * (v(j) + v(j + 1)) * h;
    }
    total
}

/// Truncated Fourier series `sum_{|j| <= N}` of `g` on `[-pi/omega, pi/omega]`.
pub fn project_field(
    g: &GridFunction,
    omega: &LatticeFrequency,
    big_n: usize,
    basis: &FrequencyBasis,
) -> Result<TrigPoly, ControlError> {
    let w = omega.value();
    let a = std::f64::consts::PI / w;
    let l = g.grid.half_length;
    if a > l * (1.0 + 1e-12) {
        return Err(ControlError::WindowMismatch {
            half_period: a,
            half_length: l,
        });
    }
    let nodes = g.grid.nodes();
    let mut terms = Vec::with_capacity(big_n + 1);
    let mean = trapezoid_window(&g.grid, &g.values, a) / (2.0 * a);
    terms.push((LatticeFrequency::ZERO, Coeffs::new(mean, 0.0)));
    let mut buf = vec![0.0; g.values.len()];
    for j in 1..=big_n {
        let k = j as f64 * w;
        for (o, (x, v)) in buf.iter_mut().zip(nodes.iter().zip(&g.values)) {
            *o = v * (k * x).cos();
        }
        let c = trapezoid_window(&g.grid, &buf, a) / a;
        for (o, (x, v)) in buf.iter_mut().zip(nodes.iter().zip(&g.values)) {
            *o = v * (k * x).sin();
        }
        let s = trapezoid_window(&g.grid, &buf, a) / a;
        terms.push((omega.multiple(j as i64, basis), Coeffs::new(c, s)));
    }
    Ok(TrigPoly::from_terms(*basis, terms))
}

/// Applies [`project_field`] to every term; the time structure is kept.
pub fn fourier_project(
    eta_n: &GriddedSchedule,
    omega: &LatticeFrequency,
    big_n: usize,
    basis: &FrequencyBasis,
) -> Result<ControlSchedule, ControlError> {
    eta_n.try_map(|g| project_field(g, omega, big_n, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig::{enumerate_lattice, make_frequency};

    fn b() -> FrequencyBasis {
        FrequencyBasis::unit_sqrt2()
    }

    /// Brute force over a box of coordinates.
    fn oracle(bound: f64) -> (u64, f64) {
        let mut best = (u64::MAX, f64::INFINITY);
        for n1 in -40i64..=40 {
            for n2 in -40i64..=40 {
                let v = n1 as f64 + n2 as f64 * std::f64::consts::SQRT_2;
                let o = n1.unsigned_abs() + n2.unsigned_abs();
                if v > 0.0 && v < bound && (o < best.0 || (o == best.0 && v < best.1)) {
                    best = (o, v);
                }
            }
        }
        best
    }

    #[test]
    fn small_window_choice() {
        let p = choose_projection_params(2, 3.0, &b()).unwrap();
        assert_eq!(p.omega.coords(), (-1, 1));
        assert_eq!(p.order, 2);
        assert!((p.omega.value() - (std::f64::consts::SQRT_2 - 1.0)).abs() < 1e-15);
        for (n, rho) in [(2, 3.0), (4, 1.0), (6, 2.0), (50, 1.0), (3, 20.0)] {
            let p = choose_projection_params(n, rho, &b()).unwrap();
            let (o, v) = oracle(p.bound);
            assert_eq!(p.order, o);
            assert!((p.omega.value() - v).abs() < 1e-12);
        }
    }

    #[test]
    fn larger_windows_never_raise_omega() {
        let mut last = f64::INFINITY;
        for n in 1..40 {
            let p = choose_projection_params(n, 1.0, &b()).unwrap();
            assert!(p.omega.value() > 0.0 && p.omega.value() < p.bound);
            assert!(p.omega.value() <= last);
            last = p.omega.value();
        }
    }

    #[test]
    fn projection_is_idempotent() {
        let omega = make_frequency(-1, 1, &b()).unwrap();
        let half = std::f64::consts::PI / omega.value();
        let grid = Grid::new(half, 256).unwrap();
        let p = TrigPoly::from_terms(
            b(),
            [
                (LatticeFrequency::ZERO, Coeffs::new(0.3, 0.0)),
                (omega.multiple(2, &b()), Coeffs::new(0.5, -0.1)),
                (omega.multiple(5, &b()), Coeffs::new(0.0, 0.7)),
            ],
        );
        let g = GridFunction::from_trig(grid, &p);
        let q = project_field(&g, &omega, 5, &b()).unwrap();
        assert!(q.approx_eq(&p, 1e-12), "{q:?}");
        let lam = enumerate_lattice(10, &b());
        assert!(q.frequencies().is_subset(&lam));
    }

    #[test]
    fn window_mismatch() {
        let omega = make_frequency(-1, 1, &b()).unwrap();
        let grid = Grid::new(5.0, 64).unwrap();
        assert!(matches!(
            project_field(&GridFunction::zeros(grid), &omega, 3, &b()),
            Err(ControlError::WindowMismatch { .. })
        ));
    }
}
