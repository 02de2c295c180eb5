//! Norms on the window and on interior intervals.
//!
//! Interval integrals use the trigonometric interpolant sampled eight times
//! finer than the grid, integrated by the trapezoid rule with partial end cells.

use serde::{Deserialize, Serialize};

use super::grid::{Grid, GridFunction, GridTrajectory};
use super::spectral::Spectral;
use super::SolverError;

const OVERSAMPLE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    Sup,
    L2Interval { a: f64, b: f64 },
    HsInterval { s: u32, a: f64, b: f64 },
    HsUl { s: u32 },
    WeightedL2 { y: f64 },
}

pub fn norm(gf: &GridFunction, kind: NormKind) -> Result<f64, SolverError> {
    match kind {
        NormKind::Sup => Ok(sup(gf)),
        NormKind::L2Interval { a, b } => l2_interval(gf, a, b),
        NormKind::HsInterval { s, a, b } => hs_interval(gf, s, a, b),
        NormKind::HsUl { s } => hs_ul(gf, s),
        NormKind::WeightedL2 { y } => Ok(weighted_l2(gf, y)),
    }
}

/// Largest norm over the stored snapshots.
pub fn trajectory_norm(traj: &GridTrajectory, kind: NormKind) -> Result<f64, SolverError> {
    traj.states
        .iter()
        .try_fold(0.0f64, |m, s| Ok(m.max(norm(s, kind)?)))
}

pub fn sup(gf: &GridFunction) -> f64 {
    gf.sup()
}

fn check_interval(grid: &Grid, a: f64, b: f64) -> Result<(), SolverError> {
    let l = grid.half_length;
    let tol = 1e-12 * l;
    if !(a <= b && a >= -l - tol && b <= l + tol) {
        return Err(SolverError::IntervalOutOfWindow { a, b, half_length: l });
    }
    Ok(())
}

/// `int_a^b |v|^2` for samples on `[-L, L)` spaced `h`, periodic.
fn integrate_sq(fine: &[f64], l: f64, h: f64, a: f64, b: f64) -> f64 {
    let m = fine.len();
    let val = |j: i64| fine[j.rem_euclid(m as i64) as usize];
    let sq = |x: f64| {
        let s = (x + l) / h;
        let j = s.floor();
        let w = s - j;
        let v = (1.0 - w) * val(j as i64) + w * val(j as i64 + 1);
        v * v
    };
    let ja = ((a + l) / h).ceil() as i64;
    let jb = ((b + l) / h).floor() as i64;
    if ja > jb {
        return 0.5 * (sq(a) + sq(b)) * (b - a);
    }
    let xa = -l + ja as f64 * h;
    let xb = -l + jb as f64 * h;
    let mut total = 0.5 * (sq(a) + val(ja).powi(2)) * (xa - a);
    total += 0.5 * (val(jb).powi(2) + sq(b)) * (b - xb);
    for j in ja..jb {
        total += 0.5 * (val(j).powi(2) + val(j + 1).powi(2)) * h;
    }
    total
}

fn fine_derivatives(gf: &GridFunction, s: u32) -> Vec<Vec<f64>> {
    let sp = Spectral::new(gf.grid);
    (0..=s)
        .map(|k| sp.oversample(&sp.derivative(&gf.values, k), OVERSAMPLE))
        .collect()
}

pub fn l2_interval(gf: &GridFunction, a: f64, b: f64) -> Result<f64, SolverError> {
    hs_interval(gf, 0, a, b)
}

/// `(sum_{k <= s} |d^k u|^2_{L^2(a, b)})^{1/2}` with spectral derivatives.
pub fn hs_interval(gf: &GridFunction, s: u32, a: f64, b: f64) -> Result<f64, SolverError> {
    check_interval(&gf.grid, a, b)?;
    let l = gf.grid.half_length;
    let h = gf.grid.dx() / OVERSAMPLE as f64;
    let total: f64 = fine_derivatives(gf, s)
        .iter()
        .map(|v| integrate_sq(v, l, h, a, b))
        .sum();
    Ok(total.sqrt())
}

/// Largest `H^s` norm over unit windows `[a, a + 1]` inside `[-L, L]`.
pub fn hs_ul(gf: &GridFunction, s: u32) -> Result<f64, SolverError> {
    let l = gf.grid.half_length;
    if 2.0 * l < 1.0 {
        return Err(SolverError::IntervalOutOfWindow { a: -l, b: -l + 1.0, half_length: l });
    }
    let h = gf.grid.dx() / OVERSAMPLE as f64;
    let fine = fine_derivatives(gf, s);
    let m = fine[0].len();
    let density: Vec<f64> = (0..m).map(|j| fine.iter().map(|v| v[j] * v[j]).sum()).collect();
    // cumulative trapezoid from -L, one extra node for x = L
    let mut cum = vec![0.0; m + 1];
    for j in 0..m {
        cum[j + 1] = cum[j] + 0.5 * (density[j] + density[(j + 1) % m]) * h;
    }
    let at = |x: f64| {
        let s = ((x + l) / h).clamp(0.0, m as f64);
        let j = (s.floor() as usize).min(m - 1);
        let w = s - j as f64;
        // exact integral of the linear interpolant of the density inside the cell
        let (d0, d1) = (density[j], density[(j + 1) % m]);
        cum[j] + h * (d0 * w + 0.5 * (d1 - d0) * w * w)
    };
    let mut best = 0.0f64;
    let mut a = -l;
    while a + 1.0 <= l + 1e-12 {
        best = best.max(at(a + 1.0) - at(a));
        a += h;
    }
    best = best.max(at(l) - at(l - 1.0));
    Ok(best.sqrt())
}

/// `exp(-dist(x, y))` with the periodic distance on the window.
pub fn periodic_weight(grid: &Grid, y: f64) -> Vec<f64> {
    let period = 2.0 * grid.half_length;
    grid.nodes()
        .iter()
        .map(|x| {
            let d = (x - y).rem_euclid(period);
            (-d.min(period - d)).exp()
        })
        .collect()
}

/// `(int exp(-dist(x, y)) u^2 dx)^{1/2}`.
pub fn weighted_l2(gf: &GridFunction, y: f64) -> f64 {
    let w = periodic_weight(&gf.grid, y);
    let s: f64 = w.iter().zip(&gf.values).map(|(a, b)| a * b * b).sum();
    (s * gf.grid.dx()).sqrt()
}
