//! FFT helpers on a periodic grid.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;

pub struct Spectral {
    pub grid: Grid,
    /// Angular wavenumber of every FFT bin.
    pub k: Vec<f64>,
    /// 2/3-rule mask.
    pub keep: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let n = grid.n;
        let mut planner = FftPlanner::new();
        let k0 = grid.k0();
        let k = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j as i64 } else { j as i64 - n as i64 };
                k0 * m as f64
            })
            .collect();
        let cutoff = n / 3;
        let keep = (0..n).map(|j| j.min(n - j) <= cutoff && j != n / 2).collect();
        Self {
            grid,
            k,
            keep,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.inverse.process(&mut buf);
        let s = 1.0 / self.n() as f64;
        buf.iter().map(|c| c.re * s).collect()
    }

    /// Multiplies by `(i k)^order`; the Nyquist bin is dropped for odd orders.
    pub fn differentiate(&self, coeffs: &mut [Complex64], order: u32) {
        let nyq = self.n() / 2;
        for (j, c) in coeffs.iter_mut().enumerate() {
            if order % 2 == 1 && j == nyq {
                *c = Complex64::new(0.0, 0.0);
                continue;
            }
            *c *= Complex64::new(0.0, self.k[j]).powu(order);
        }
    }

    pub fn derivative(&self, values: &[f64], order: u32) -> Vec<f64> {
        if order == 0 {
            return values.to_vec();
        }
        let mut c = self.forward(values);
        self.differentiate(&mut c, order);
        self.inverse(&c)
    }

    pub fn apply_mask(&self, coeffs: &mut [Complex64]) {
        for (c, keep) in coeffs.iter_mut().zip(&self.keep) {
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// `exp(-mu k^2 t)` for every bin.
    pub fn heat_factor(&self, mu: f64, t: f64) -> Vec<f64> {
        self.k.iter().map(|k| (-mu * k * k * t).exp()).collect()
    }

    /// Values of the trigonometric interpolant on a grid `factor` times finer.
    pub fn oversample(&self, values: &[f64], factor: usize) -> Vec<f64> {
        let n = self.n();
        let m = n * factor;
        let c = self.forward(values);
        let mut big = vec![Complex64::new(0.0, 0.0); m];
        let half = n / 2;
        for j in 0..half {
            big[j] = c[j];
        }
        for j in 1..half {
            big[m - j] = c[n - j];
        }
        // split the Nyquist bin symmetrically
        big[half] = c[half] * 0.5;
        big[m - half] = c[half] * 0.5;
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(m).process(&mut big);
        let s = 1.0 / n as f64;
        big.iter().map(|c| c.re * s).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sine() {
        let g = Grid::new(std::f64::consts::PI, 64).unwrap();
        let sp = Spectral::new(g);
        let u: Vec<f64> = g.nodes().iter().map(|x| (3.0 * x).sin()).collect();
        let du = sp.derivative(&u, 1);
        let d2 = sp.derivative(&u, 2);
        for (i, x) in g.nodes().iter().enumerate() {
            assert!((du[i] - 3.0 * (3.0 * x).cos()).abs() < 1e-12);
            assert!((d2[i] + 9.0 * (3.0 * x).sin()).abs() < 1e-11);
        }
    }

    #[test]
    fn oversample_interpolates() {
        let g = Grid::new(2.0, 32).unwrap();
        let sp = Spectral::new(g);
        let k = g.k0() * 5.0;
        let u: Vec<f64> = g.nodes().iter().map(|x| (k * x).cos() + 0.5).collect();
        let fine = sp.oversample(&u, 4);
        let h = g.dx() / 4.0;
        for (j, v) in fine.iter().enumerate() {
            let x = -2.0 + j as f64 * h;
            assert!((v - (k * x).cos() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn mask_keeps_lower_two_thirds() {
        let g = Grid::new(1.0, 48usize.next_power_of_two()).unwrap();
        let sp = Spectral::new(g);
        let kept = sp.keep.iter().filter(|k| **k).count();
        assert_eq!(kept, 2 * (64 / 3) + 1);
    }
}
