//! Time-dependent right-hand sides.

use serde::{Deserialize, Serialize};

use super::grid::{Grid, GridFunction};
use crate::trig::TrigPoly;

/// Which one-sided limit to take at a time where the forcing jumps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Evaluates a forcing on a fixed grid, caching whatever it can.
pub trait Sampler {
    fn sample(&mut self, t: f64, side: Side, out: &mut [f64]);
}

/// A space-time field `f(t, x)`.
pub trait Forcing: Sync {
    fn sampler<'a>(&'a self, grid: &Grid) -> Box<dyn Sampler + 'a>;

    /// Times where the field may jump; the solver steps onto them exactly.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn is_zero(&self) -> bool {
        false
    }
}

pub fn sample(f: &dyn Forcing, grid: &Grid, t: f64, side: Side) -> GridFunction {
    let mut out = vec![0.0; grid.n];
    f.sampler(grid).sample(t, side, &mut out);
    GridFunction { grid: *grid, values: out }
}

/// The zero field.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoForcing;

struct ZeroSampler;

impl Sampler for ZeroSampler {
    fn sample(&mut self, _: f64, _: Side, out: &mut [f64]) {
        out.fill(0.0);
    }
}

impl Forcing for NoForcing {
    fn sampler<'a>(&'a self, _: &Grid) -> Box<dyn Sampler + 'a> {
        Box::new(ZeroSampler)
    }

    fn is_zero(&self) -> bool {
        true
    }
}

struct FixedSampler(Vec<f64>);

impl Sampler for FixedSampler {
    fn sample(&mut self, _: f64, _: Side, out: &mut [f64]) {
        out.copy_from_slice(&self.0);
    }
}

/// A time-independent trigonometric polynomial.
impl Forcing for TrigPoly {
    fn sampler<'a>(&'a self, grid: &Grid) -> Box<dyn Sampler + 'a> {
        Box::new(FixedSampler(self.evaluate_many(&grid.nodes())))
    }

    fn is_zero(&self) -> bool {
        TrigPoly::is_zero(self)
    }
}

/// A time-independent grid function.
impl Forcing for GridFunction {
    fn sampler<'a>(&'a self, grid: &Grid) -> Box<dyn Sampler + 'a> {
        assert_eq!(*grid, self.grid, "forcing sampled on a different grid");
        Box::new(FixedSampler(self.values.clone()))
    }
}

/// Pointwise closure `(t, x) -> f`.
pub struct FnForcing<F> {
    pub f: F,
    pub breakpoints: Vec<f64>,
}

impl<F: Fn(f64, f64) -> f64 + Sync> FnForcing<F> {
    pub fn new(f: F) -> Self {
        Self {
            f,
            breakpoints: Vec::new(),
        }
    }
}

struct FnSampler<'a, F> {
    f: &'a F,
    nodes: Vec<f64>,
}

impl<F: Fn(f64, f64) -> f64> Sampler for FnSampler<'_, F> {
    fn sample(&mut self, t: f64, side: Side, out: &mut [f64]) {
        // left limits of a pointwise closure: evaluate just before t
        let t = match side {
            Side::Left => t.next_down(),
            Side::Right => t,
        };
        for (o, x) in out.iter_mut().zip(&self.nodes) {
            *o = (self.f)(t, *x);
        }
    }
}

impl<F: Fn(f64, f64) -> f64 + Sync> Forcing for FnForcing<F> {
    fn sampler<'a>(&'a self, grid: &Grid) -> Box<dyn Sampler + 'a> {
        Box::new(FnSampler {
            f: &self.f,
            nodes: grid.nodes(),
        })
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
}

/// Piecewise-linear interpolation in time between grid functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledForcing {
    pub times: Vec<f64>,
    pub frames: Vec<GridFunction>,
}

impl SampledForcing {
    pub fn new(times: Vec<f64>, frames: Vec<GridFunction>) -> Self {
        assert_eq!(times.len(), frames.len());
        assert!(!times.is_empty());
        assert!(times.windows(2).all(|w| w[0] < w[1]), "times must increase");
        Self { times, frames }
    }

    fn at(&self, t: f64, out: &mut [f64]) {
        let i = self.times.partition_point(|s| *s <= t);
        if i == 0 {
            out.copy_from_slice(&self.frames[0].values);
        } else if i == self.times.len() {
            out.copy_from_slice(&self.frames[i - 1].values);
        } else {
            let (t0, t1) = (self.times[i - 1], self.times[i]);
            let w = (t - t0) / (t1 - t0);
            for ((o, a), b) in out
                .iter_mut()
                .zip(&self.frames[i - 1].values)
                .zip(&self.frames[i].values)
            {
                *o = (1.0 - w) * a + w * b;
            }
        }
    }
}

struct SampledSampler<'a>(&'a SampledForcing);

impl Sampler for SampledSampler<'_> {
    fn sample(&mut self, t: f64, _: Side, out: &mut [f64]) {
        self.0.at(t, out);
    }
}

impl Forcing for SampledForcing {
    fn sampler<'a>(&'a self, grid: &Grid) -> Box<dyn Sampler + 'a> {
        assert_eq!(*grid, self.frames[0].grid, "forcing sampled on a different grid");
        Box::new(SampledSampler(self))
    }
}

/// Sum of several fields, such as a fixed force plus a control.
pub struct SumForcing<'a>(pub Vec<&'a dyn Forcing>);

struct SumSampler<'a> {
    parts: Vec<Box<dyn Sampler + 'a>>,
    buf: Vec<f64>,
}

impl Sampler for SumSampler<'_> {
    fn sample(&mut self, t: f64, side: Side, out: &mut [f64]) {
        out.fill(0.0);
        for p in self.parts.iter_mut() {
            p.sample(t, side, &mut self.buf);
            for (o, v) in out.iter_mut().zip(&self.buf) {
                *o += v;
            }
        }
    }
}

impl Forcing for SumForcing<'_> {
    fn sampler<'b>(&'b self, grid: &Grid) -> Box<dyn Sampler + 'b> {
        Box::new(SumSampler {
            parts: self
                .0
                .iter()
                .filter(|f| !f.is_zero())
                .map(|f| f.sampler(grid))
                .collect(),
            buf: vec![0.0; grid.n],
        })
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.0.iter().flat_map(|f| f.breakpoints()).collect()
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|f| f.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig::FrequencyBasis;

    #[test]
    fn sum_and_sampled() {
        let grid = Grid::new(std::f64::consts::PI, 16).unwrap();
        let p = TrigPoly::sin(FrequencyBasis::unit_sqrt2(), 1, 0, 2.0);
        let a = GridFunction::from_fn(grid, |_| 1.0);
        let b = GridFunction::from_fn(grid, |_| 3.0);
        let s = SampledForcing::new(vec![0.0, 1.0], vec![a, b]);
        let sum = SumForcing(vec![&p, &s, &NoForcing]);
        let v = sample(&sum, &grid, 0.25, Side::Left);
        for (i, x) in grid.nodes().iter().enumerate() {
            assert!((v.values[i] - 2.0 * x.sin() - 1.5).abs() < 1e-14);
        }
        assert!(!sum.is_zero());
        assert!(SumForcing(vec![&NoForcing]).is_zero());
    }
}
