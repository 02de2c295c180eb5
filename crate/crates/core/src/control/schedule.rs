//! Piecewise descriptions of time-dependent controls.
//!
//! A schedule partitions `[0, T]` into segments; on each segment the control
//! is a finite sum `sum_i p_i(t) C_i` of scalar time profiles times spatial
//! fields. With trigonometric fields the whole control stays exact.

use serde::{Deserialize, Serialize};

use super::ControlError;
use crate::quad;
use crate::smooth::{smoothstep, smoothstep_prime};
use crate::solver::{Forcing, Grid, GridFunction, Sampler, Side};
use crate::trig::TrigPoly;

const TIME_TOL: f64 = 1e-12;

/// Scalar factor of one term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TimeProfile {
    /// `sum_k c_k t^k` in absolute time.
    Poly { coeffs: Vec<f64> },
    /// `S((t - start) / width)`, rising from 0 to 1.
    Ramp { start: f64, width: f64 },
    /// Time derivative of the matching ramp.
    RampRate { start: f64, width: f64 },
}

impl TimeProfile {
    pub fn constant() -> Self {
        TimeProfile::Poly { coeffs: vec![1.0] }
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        TimeProfile::Poly { coeffs }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeProfile::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            TimeProfile::Ramp { start, width } => smoothstep((t - start) / width),
            TimeProfile::RampRate { start, width } => smoothstep_prime((t - start) / width) / width,
        }
    }

    /// `None` for ramp rates, whose derivative is not needed anywhere.
    pub fn derivative(&self) -> Option<TimeProfile> {
        match self {
            TimeProfile::Poly { coeffs } => Some(TimeProfile::Poly {
                coeffs: coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| k as f64 * c)
                    .collect(),
            }),
            TimeProfile::Ramp { start, width } => Some(TimeProfile::RampRate {
                start: *start,
                width: *width,
            }),
            TimeProfile::RampRate { .. } => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            TimeProfile::Poly { coeffs } => coeffs.iter().skip(1).all(|c| *c == 0.0),
            _ => false,
        }
    }

    /// Mean over `[a, b]`.
    pub fn average(&self, a: f64, b: f64) -> f64 {
        match self {
            TimeProfile::Poly { coeffs } => {
                // exact antiderivative
                let prim = |t: f64| {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| c * t.powi(k as i32 + 1) / (k as f64 + 1.0))
                        .sum::<f64>()
                };
                (prim(b) - prim(a)) / (b - a)
            }
            TimeProfile::RampRate { start, width } => {
                let ramp = TimeProfile::Ramp { start: *start, width: *width };
                (ramp.eval(b) - ramp.eval(a)) / (b - a)
            }
            TimeProfile::Ramp { start, width } => {
                // split at the ramp ends so each piece is smooth
                let mut cuts = vec![a, b];
                cuts.extend([*start, start + width].into_iter().filter(|c| *c > a && *c < b));
                cuts.sort_by(f64::total_cmp);
                let total: f64 = cuts
                    .windows(2)
                    .map(|w| quad::integrate(|t| self.eval(t), w[0], w[1], 32))
                    .sum();
                total / (b - a)
            }
        }
    }
}

/// How smooth a schedule is in time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    Smooth,
    PiecewiseConstant,
    Mollified,
}

/// Spatial factor of a term.
pub trait Field: Clone + Send + Sync {
    fn samples(&self, grid: &Grid) -> Vec<f64>;
    fn zero_like(&self) -> Self;
    /// `self + a * x`.
    fn axpy(&self, a: f64, x: &Self) -> Self;
}

impl Field for TrigPoly {
    fn samples(&self, grid: &Grid) -> Vec<f64> {
        self.evaluate_many(&grid.nodes())
    }

    fn zero_like(&self) -> Self {
        TrigPoly::zero(*self.basis())
    }

    fn axpy(&self, a: f64, x: &Self) -> Self {
        TrigPoly::linear(self, x, 1.0, a)
    }
}

impl Field for GridFunction {
    fn samples(&self, grid: &Grid) -> Vec<f64> {
        assert_eq!(*grid, self.grid, "control sampled on a different grid");
        self.values.clone()
    }

    fn zero_like(&self) -> Self {
        GridFunction::zeros(self.grid)
    }

    fn axpy(&self, a: f64, x: &Self) -> Self {
        self.zip_with(x, |p, q| p + a * q)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term<C> {
    pub profile: TimeProfile,
    pub field: C,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment<C> {
    pub start: f64,
    pub end: f64,
    pub terms: Vec<Term<C>>,
}

impl<C: Field> Segment<C> {
    pub fn eval(&self, t: f64) -> C {
        let first = &self.terms[0];
        let mut acc = first.field.zero_like();
        for term in &self.terms {
            acc = acc.axpy(term.profile.eval(t), &term.field);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule<C> {
    pub horizon: f64,
    pub smoothness: Smoothness,
    pub segments: Vec<Segment<C>>,
}

/// Exact, trigonometric-polynomial valued control.
pub type ControlSchedule = Schedule<TrigPoly>;
/// Grid-sampled control.
pub type GriddedSchedule = Schedule<GridFunction>;

impl<C: Field> Schedule<C> {
    /// Checks that the segments partition `[0, horizon]` and carry terms.
    pub fn new(
        horizon: f64,
        smoothness: Smoothness,
        segments: Vec<Segment<C>>,
    ) -> Result<Self, ControlError> {
        let bad = |m: &str| Err(ControlError::InvalidSchedule(m.to_string()));
        if !(horizon > 0.0 && horizon.is_finite()) {
            return bad("horizon must be positive");
        }
        if segments.is_empty() {
            return bad("no segments");
        }
        let tol = TIME_TOL * horizon;
        if segments[0].start.abs() > tol || (segments.last().unwrap().end - horizon).abs() > tol {
            return bad("segments must start at 0 and end at the horizon");
        }
        for s in &segments {
            if !(s.end > s.start) {
                return bad("empty segment");
            }
            if s.terms.is_empty() {
                return bad("segment without terms");
            }
        }
        if segments.windows(2).any(|w| (w[0].end - w[1].start).abs() > tol) {
            return bad("segments must be contiguous");
        }
        Ok(Self {
            horizon,
            smoothness,
            segments,
        })
    }

    pub fn constant(horizon: f64, field: C) -> Self {
        Self {
            horizon,
            smoothness: Smoothness::Smooth,
            segments: vec![Segment {
                start: 0.0,
                end: horizon,
                terms: vec![Term {
                    profile: TimeProfile::constant(),
                    field,
                }],
            }],
        }
    }

    /// One segment `sum_k t^k C_k`.
    pub fn polynomial(horizon: f64, coeffs: Vec<C>) -> Self {
        let terms = coeffs
            .into_iter()
            .enumerate()
            .map(|(k, field)| Term {
                profile: TimeProfile::monomial(k),
                field,
            })
            .collect();
        Self {
            horizon,
            smoothness: Smoothness::Smooth,
            segments: vec![Segment {
                start: 0.0,
                end: horizon,
                terms,
            }],
        }
    }

    /// Piecewise constant on the given breakpoints `0 = t_0 < ... < t_P = T`.
    pub fn piecewise_constant(times: &[f64], values: Vec<C>) -> Result<Self, ControlError> {
        if times.len() != values.len() + 1 {
            return Err(ControlError::InvalidSchedule(
                "need one value per interval".into(),
            ));
        }
        let segments = values
            .into_iter()
            .enumerate()
            .map(|(i, field)| Segment {
                start: times[i],
                end: times[i + 1],
                terms: vec![Term {
                    profile: TimeProfile::constant(),
                    field,
                }],
            })
            .collect();
        Self::new(*times.last().unwrap(), Smoothness::PiecewiseConstant, segments)
    }

    pub fn segment_index(&self, t: f64, side: Side) -> usize {
        let n = self.segments.len();
        match side {
            Side::Right => {
                let i = self.segments.partition_point(|s| s.start <= t);
                i.saturating_sub(1).min(n - 1)
            }
            Side::Left => self.segments.partition_point(|s| s.end < t).min(n - 1),
        }
    }

    pub fn eval(&self, t: f64, side: Side) -> C {
        self.segments[self.segment_index(t, side)].eval(t)
    }

    /// Interior segment boundaries.
    pub fn switch_times(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.start).collect()
    }

    pub fn map<D>(&self, mut f: impl FnMut(&C) -> D) -> Schedule<D> {
        self.try_map(|c| Ok::<D, ()>(f(c))).expect("infallible")
    }

    pub fn try_map<D, E>(&self, mut f: impl FnMut(&C) -> Result<D, E>) -> Result<Schedule<D>, E> {
        let mut segments = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            let mut terms = Vec::with_capacity(s.terms.len());
            for t in &s.terms {
                terms.push(Term {
                    profile: t.profile.clone(),
                    field: f(&t.field)?,
                });
            }
            segments.push(Segment {
                start: s.start,
                end: s.end,
                terms,
            });
        }
        Ok(Schedule {
            horizon: self.horizon,
            smoothness: self.smoothness,
            segments,
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|f| f.zero_like().axpy(c, f))
    }

    /// Exact time derivative; `None` if some term has no derivative profile.
    pub fn time_derivative(&self) -> Option<Self> {
        let mut segments = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            let mut terms = Vec::new();
            for t in &s.terms {
                terms.push(Term {
                    profile: t.profile.derivative()?,
                    field: t.field.clone(),
                });
            }
            segments.push(Segment {
                start: s.start,
                end: s.end,
                terms,
            });
        }
        Some(Schedule {
            horizon: self.horizon,
            smoothness: self.smoothness,
            segments,
        })
    }

    /// Sum over the common refinement of both partitions.
    pub fn add(&self, other: &Self) -> Self {
        assert!(
            (self.horizon - other.horizon).abs() <= TIME_TOL * self.horizon,
            "schedules with different horizons"
        );
        let tol = TIME_TOL * self.horizon;
        let mut cuts: Vec<f64> = self
            .segments
            .iter()
            .chain(&other.segments)
            .flat_map(|s| [s.start, s.end])
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= tol);
        let segments = cuts
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let a = &self.segments[self.segment_index(mid, Side::Right)];
                let b = &other.segments[other.segment_index(mid, Side::Right)];
                Segment {
                    start: w[0],
                    end: w[1],
                    terms: a.terms.iter().chain(&b.terms).cloned().collect(),
                }
            })
            .collect();
        let smoothness = if self.smoothness == other.smoothness {
            self.smoothness
        } else if self.smoothness == Smoothness::PiecewiseConstant
            || other.smoothness == Smoothness::PiecewiseConstant
        {
            Smoothness::PiecewiseConstant
        } else {
            Smoothness::Mollified
        };
        Schedule {
            horizon: self.horizon,
            smoothness,
            segments,
        }
    }

    pub fn is_piecewise_constant(&self) -> bool {
        self.segments
            .iter()
            .all(|s| s.terms.iter().all(|t| t.profile.is_constant()))
    }

    /// Averages over `p` equal intervals of `[0, T]`.
    pub fn quantize(&self, p: usize) -> Result<Self, ControlError> {
        if p < 1 {
            return Err(ControlError::QuantizationTooCoarse(p));
        }
        let h = self.horizon / p as f64;
        let times: Vec<f64> = (0..=p)
            .map(|i| if i == p { self.horizon } else { i as f64 * h })
            .collect();
        let mut values = Vec::with_capacity(p);
        for w in times.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut acc = self.segments[0].terms[0].field.zero_like();
            for s in &self.segments {
                let (lo, hi) = (s.start.max(a), s.end.min(b));
                if hi - lo <= TIME_TOL * self.horizon {
                    continue;
                }
                let frac = (hi - lo) / (b - a);
                for t in &s.terms {
                    acc = acc.axpy(frac * t.profile.average(lo, hi), &t.field);
                }
            }
            values.push(acc);
        }
        Self::piecewise_constant(&times, values)
    }

    /// Pre-samples every term on `grid`.
    pub fn sampled(&self, grid: &Grid) -> SampledSchedule {
        SampledSchedule {
            starts: self.segments.iter().map(|s| s.start).collect(),
            ends: self.segments.iter().map(|s| s.end).collect(),
            terms: self
                .segments
                .iter()
                .map(|s| {
                    s.terms
                        .iter()
                        .map(|t| (t.profile.clone(), t.field.samples(grid)))
                        .collect()
                })
                .collect(),
            n: grid.n,
        }
    }
}

impl ControlSchedule {
    /// Largest lattice order among all fields.
    pub fn max_order(&self) -> u64 {
        self.segments
            .iter()
            .flat_map(|s| s.terms.iter().map(|t| t.field.max_order()))
            .max()
            .unwrap_or(0)
    }
}

/// Schedule with every field sampled on a fixed grid.
pub struct SampledSchedule {
    starts: Vec<f64>,
    ends: Vec<f64>,
    terms: Vec<Vec<(TimeProfile, Vec<f64>)>>,
    n: usize,
}

impl SampledSchedule {
    fn index(&self, t: f64, side: Side) -> usize {
        let n = self.starts.len();
        match side {
            Side::Right => self.starts.partition_point(|s| *s <= t).saturating_sub(1).min(n - 1),
            Side::Left => self.ends.partition_point(|e| *e < t).min(n - 1),
        }
    }

    pub fn eval_into(&self, t: f64, side: Side, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        out.fill(0.0);
        for (p, v) in &self.terms[self.index(t, side)] {
            let c = p.eval(t);
            if c != 0.0 {
                for (o, x) in out.iter_mut().zip(v) {
                    *o += c * x;
                }
            }
        }
    }
}

struct ScheduleSampler(SampledSchedule);

impl Sampler for ScheduleSampler {
    fn sample(&mut self, t: f64, side: Side, out: &mut [f64]) {
        self.0.eval_into(t, side, out);
    }
}

impl<C: Field> Forcing for Schedule<C> {
    fn sampler<'a>(&'a self, grid: &Grid) -> Box<dyn Sampler + 'a> {
        Box::new(ScheduleSampler(self.sampled(grid)))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.switch_times()
    }
}
