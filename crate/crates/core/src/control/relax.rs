//! Relaxation of controls from `F(N, G)` to `G` by fast oscillations.

use serde::{Deserialize, Serialize};

use super::schedule::{ControlSchedule, Schedule, Segment, Smoothness, Term, TimeProfile};
use super::ControlError;
use crate::solver::Side;
use crate::trig::{convex_decompose, ConvexDecomposition, FrequencyDomain, TrigPoly};

/// `zeta^j` with dwell fraction `alpha_j` on one constancy interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationInterval {
    pub start: f64,
    pub end: f64,
    pub weights: Vec<f64>,
    pub zetas: Vec<TrigPoly>,
}

impl OscillationInterval {
    pub fn mean(&self) -> TrigPoly {
        let parts: Vec<TrigPoly> = self
            .zetas
            .iter()
            .zip(&self.weights)
            .map(|(z, a)| z.scale(*a))
            .collect();
        TrigPoly::sum(*self.zetas[0].basis(), &parts)
    }

    /// `sum_j alpha_j B(zeta^j)`.
    pub fn mean_burgers(&self) -> TrigPoly {
        let parts: Vec<TrigPoly> = self
            .zetas
            .iter()
            .zip(&self.weights)
            .map(|(z, a)| z.burgers().scale(*a))
            .collect();
        TrigPoly::sum(*self.zetas[0].basis(), &parts)
    }

    pub fn min_weight(&self) -> f64 {
        self.weights
            .iter()
            .copied()
            .filter(|w| *w > 0.0)
            .fold(f64::INFINITY, f64::min)
    }
}

/// `zeta_m`: on every interval `J_i`, `m` periods cycling through the
/// `zeta^j` with dwell fractions `alpha_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationSchedule {
    pub horizon: f64,
    pub m: usize,
    pub intervals: Vec<OscillationInterval>,
}

/// A maximal time interval on which `zeta_m` is constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub value: TrigPoly,
}

impl OscillationSchedule {
    pub fn pieces(&self) -> Vec<Piece> {
        let mut out: Vec<Piece> = Vec::new();
        for iv in &self.intervals {
            let period = (iv.end - iv.start) / self.m as f64;
            for k in 0..self.m {
                let base = iv.start + k as f64 * period;
                let mut acc = 0.0;
                for (j, (a, z)) in iv.weights.iter().zip(&iv.zetas).enumerate() {
                    if *a <= 0.0 {
                        continue;
                    }
                    let s = base + acc * period;
                    acc += a;
                    let last = k + 1 == self.m && j + 1 == iv.weights.len();
                    let e = if last { iv.end } else { base + acc * period };
                    match out.last_mut() {
                        Some(p) if p.value == *z => p.end = e,
                        _ => out.push(Piece {
                            start: s,
                            end: e,
                            value: z.clone(),
                        }),
                    }
                }
            }
        }
        out
    }

    /// Number of interior switches.
    pub fn switch_count(&self) -> usize {
        self.pieces().len().saturating_sub(1)
    }

    /// Unmollified, piecewise-constant `zeta_m`.
    pub fn as_schedule(&self) -> ControlSchedule {
        let pieces = self.pieces();
        let mut times: Vec<f64> = pieces.iter().map(|p| p.start).collect();
        times.push(self.horizon);
        Schedule::piecewise_constant(&times, pieces.into_iter().map(|p| p.value).collect())
            .expect("pieces partition the horizon")
    }

    /// `zeta_bar = sum_j alpha_j zeta^j` on each interval.
    pub fn mean_schedule(&self) -> ControlSchedule {
        let mut times: Vec<f64> = self.intervals.iter().map(|iv| iv.start).collect();
        times.push(self.horizon);
        Schedule::piecewise_constant(&times, self.intervals.iter().map(|iv| iv.mean()).collect())
            .expect("intervals partition the horizon")
    }

    /// `C^inf` version: smooth ramps of width `theta` centered at every switch,
    /// a ramp up from zero on `[0, theta]` and down to zero on `[T - theta, T]`.
    pub fn mollified(&self, theta: f64) -> Result<ControlSchedule, ControlError> {
        let pieces = self.pieces();
        let switches = pieces.len() - 1;
        let too_wide = ControlError::RampTooWide {
            theta,
            switches,
            horizon: self.horizon,
        };
        if !(theta > 0.0) || 2.0 * theta * switches as f64 > self.horizon {
            return Err(too_wide);
        }
        let count = pieces.len();
        for (i, p) in pieces.iter().enumerate() {
            let need = match (i == 0, i + 1 == count) {
                (true, true) => 2.0 * theta,
                (true, false) | (false, true) => 1.5 * theta,
                (false, false) => theta,
            };
            if p.end - p.start < need * (1.0 - 1e-12) {
                return Err(too_wide);
            }
        }
        let zero = pieces[0].value.zero_like_poly();
        // (start, from, to) for every ramp
        let mut ramps = vec![(0.0, zero.clone(), pieces[0].value.clone())];
        for w in pieces.windows(2) {
            ramps.push((w[0].end - 0.5 * theta, w[0].value.clone(), w[1].value.clone()));
        }
        ramps.push((self.horizon - theta, pieces[count - 1].value.clone(), zero));

        let constant = |field: TrigPoly| Term {
            profile: TimeProfile::constant(),
            field,
        };
        let mut segments = Vec::new();
        let mut t = 0.0;
        for (start, from, to) in ramps {
            if start > t {
                segments.push(Segment {
                    start: t,
                    end: start,
                    terms: vec![constant(from.clone())],
                });
            }
            let end = (start + theta).min(self.horizon);
            segments.push(Segment {
                start,
                end,
                terms: vec![
                    constant(from.clone()),
                    Term {
                        profile: TimeProfile::Ramp {
                            start,
                            width: theta,
                        },
                        field: to.sub(&from),
                    },
                ],
            });
            t = end;
        }
        if let Some(last) = segments.last_mut() {
            last.end = self.horizon;
        }
        Schedule::new(self.horizon, Smoothness::Mollified, segments)
    }

    /// Time spent on each `zeta^j` of interval `i`, per period, measured on the schedule.
    pub fn dwell_fractions(&self, i: usize) -> Vec<f64> {
        let iv = &self.intervals[i];
        let period = (iv.end - iv.start) / self.m as f64;
        let s = self.as_schedule();
        iv.zetas
            .iter()
            .map(|z| {
                s.segments
                    .iter()
                    .filter(|seg| seg.start >= iv.start - 1e-12 && seg.end <= iv.end + 1e-12)
                    .filter(|seg| seg.terms[0].field == *z)
                    .map(|seg| seg.end - seg.start)
                    .sum::<f64>()
                    / (self.m as f64 * period)
            })
            .collect()
    }
}

trait ZeroLike {
    fn zero_like_poly(&self) -> TrigPoly;
}

impl ZeroLike for TrigPoly {
    fn zero_like_poly(&self) -> TrigPoly {
        TrigPoly::zero(*self.basis())
    }
}

/// Output of [`relax_level`].
#[derive(Clone, Debug)]
pub struct RelaxedLevel {
    /// `G`-valued shift, constant on every interval.
    pub eta_g: ControlSchedule,
    pub zeta: OscillationSchedule,
    pub decompositions: Vec<ConvexDecomposition>,
}

impl RelaxedLevel {
    /// Largest state-independent residual over the intervals.
    pub fn residual_bound(&self) -> f64 {
        self.decompositions
            .iter()
            .map(|d| d.residual_bound)
            .fold(0.0, f64::max)
    }
}

/// Decomposes a piecewise-constant `F(N, G)`-valued control interval by
/// interval and builds the fast-oscillating `zeta_m`.
pub fn relax_level(
    eta: &ControlSchedule,
    nu: f64,
    m: usize,
    generators: &[TrigPoly],
    g: &dyn FrequencyDomain,
) -> Result<RelaxedLevel, ControlError> {
    if !eta.is_piecewise_constant() {
        return Err(ControlError::NotPiecewiseConstant);
    }
    if m == 0 {
        return Err(ControlError::InvalidSchedule("m must be positive".into()));
    }
    let mut times = Vec::with_capacity(eta.segments.len() + 1);
    let mut shifts = Vec::new();
    let mut intervals = Vec::new();
    let mut decompositions = Vec::new();
    for seg in &eta.segments {
        let value = seg.eval(seg.start);
        let dec = convex_decompose(&value, nu, generators, g)?;
        times.push(seg.start);
        shifts.push(dec.eta.clone());
        intervals.push(OscillationInterval {
            start: seg.start,
            end: seg.end,
            weights: dec.weights_f64(),
            zetas: dec.zetas.clone(),
        });
        decompositions.push(dec);
    }
    times.push(eta.horizon);
    Ok(RelaxedLevel {
        eta_g: Schedule::piecewise_constant(&times, shifts)?,
        zeta: OscillationSchedule {
            horizon: eta.horizon,
            m,
            intervals,
        },
        decompositions,
    })
}

/// Right-hand side `f` and shift `g` of the averaged equation
/// `u_t - mu (u + g)_xx + B(u + g) = h + f` with
/// `g = zeta_bar` and `f = eta_G + B(zeta_bar) - sum_j alpha_j B(zeta^j)`.
pub fn averaged_forcing(
    eta_g: &ControlSchedule,
    zeta: &OscillationSchedule,
) -> (ControlSchedule, ControlSchedule) {
    let mut times: Vec<f64> = zeta.intervals.iter().map(|iv| iv.start).collect();
    times.push(zeta.horizon);
    let corr: Vec<TrigPoly> = zeta
        .intervals
        .iter()
        .map(|iv| iv.mean().burgers().sub(&iv.mean_burgers()))
        .collect();
    let corr = Schedule::piecewise_constant(&times, corr).expect("intervals partition the horizon");
    (eta_g.add(&corr), zeta.mean_schedule())
}

/// Time steps per mollifier ramp; coarser steps misintegrate `d/dt zeta_theta`.
pub const RAMP_STEPS: f64 = 32.0;

/// `T / (40 s)` for `s` switches.
pub fn default_theta(zeta: &OscillationSchedule) -> f64 {
    zeta.horizon / (40.0 * zeta.switch_count().max(1) as f64)
}

/// `eta + d/dt zeta_theta`, with `zeta_theta` the mollified oscillation.
pub fn absorb_zeta(
    eta: &ControlSchedule,
    zeta: &OscillationSchedule,
    theta: f64,
) -> Result<ControlSchedule, ControlError> {
    let smooth = zeta.mollified(theta)?;
    let rate = smooth.time_derivative().expect("ramps have derivatives");
    let mut out = eta.add(&rate);
    out.smoothness = Smoothness::Mollified;
    Ok(out)
}

/// Value of `zeta_theta` at `t` (right limit).
pub fn mollified_value(
    zeta: &OscillationSchedule,
    theta: f64,
    t: f64,
) -> Result<TrigPoly, ControlError> {
    Ok(zeta.mollified(theta)?.eval(t, Side::Right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig::{
        bilinear, make_control_space, standard_generators, FrequencyBasis,
    };

    fn b() -> FrequencyBasis {
        FrequencyBasis::unit_sqrt2()
    }

    fn one_term() -> TrigPoly {
        bilinear(&TrigPoly::sin(b(), 1, 0, 1.0), &TrigPoly::cos(b(), 0, 1, 1.0)).scale(-1.0)
    }

    fn relaxed(m: usize) -> RelaxedLevel {
        let eta = Schedule::constant(1.0, one_term());
        let q = eta.quantize(2).unwrap();
        relax_level(&q, 0.05, m, &standard_generators(&b()), &make_control_space(&b())).unwrap()
    }

    #[test]
    fn dwell_fractions_match_weights() {
        let r = relaxed(8);
        for i in 0..2 {
            let d = r.zeta.dwell_fractions(i);
            for (a, w) in d.iter().zip(&r.zeta.intervals[i].weights) {
                assert!((a - w).abs() < 1e-12);
            }
        }
        assert_eq!(r.zeta.switch_count(), 2 * 8 * 2 - 1);
    }

    #[test]
    fn element_of_g_gives_no_oscillation() {
        let p = TrigPoly::sin(b(), 1, 1, 0.5);
        let eta = Schedule::constant(1.0, p.clone());
        let r = relax_level(&eta, 0.01, 4, &standard_generators(&b()), &make_control_space(&b()))
            .unwrap();
        assert_eq!(r.eta_g.eval(0.5, Side::Right), p);
        assert!(r.zeta.intervals[0].zetas.iter().all(|z| z.is_zero()));
        assert_eq!(r.zeta.pieces().len(), 1);
    }

    #[test]
    fn needs_piecewise_constant() {
        let p = TrigPoly::sin(b(), 1, 1, 0.5);
        let eta = Schedule::polynomial(1.0, vec![p.clone(), p]);
        assert!(matches!(
            relax_level(&eta, 0.01, 4, &standard_generators(&b()), &make_control_space(&b())),
            Err(ControlError::NotPiecewiseConstant)
        ));
    }

    #[test]
    fn averaged_equation_reproduces_target() {
        // the averaged forcing equals eta1 - B-residual for any state
        let r = relaxed(4);
        let (f, g) = averaged_forcing(&r.eta_g, &r.zeta);
        let gbar = g.eval(0.3, Side::Right);
        assert!(gbar.max_coefficient() < 1e-12);
        let diff = f.eval(0.3, Side::Right).sub(&one_term());
        let res = &r.decompositions[0].residual;
        assert!(diff.add(res).max_coefficient() < 1e-9, "{diff:?}");
    }

    #[test]
    fn mollified_schedule() {
        let r = relaxed(2);
        let theta = default_theta(&r.zeta);
        let s = r.zeta.mollified(theta).unwrap();
        assert!(s.eval(0.0, Side::Right).is_zero());
        assert!(s.eval(1.0, Side::Left).max_coefficient() < 1e-12);
        // continuous at every segment boundary
        for w in s.segments.windows(2) {
            let t = w[0].end;
            let a = s.eval(t, Side::Left);
            let c = s.eval(t, Side::Right);
            assert!(a.sub(&c).max_coefficient() < 1e-12);
        }
        // away from the ramps it equals the unmollified value
        let raw = r.zeta.as_schedule();
        let p = &r.zeta.pieces()[3];
        let mid = 0.5 * (p.start + p.end);
        assert!(s.eval(mid, Side::Right).approx_eq(&raw.eval(mid, Side::Right), 1e-14));
        assert!(matches!(
            r.zeta.mollified(0.1),
            Err(ControlError::RampTooWide { .. })
        ));
    }

    #[test]
    fn mollified_is_c1() {
        let r = relaxed(2);
        let theta = default_theta(&r.zeta);
        let s = r.zeta.mollified(theta).unwrap();
        let ds = s.time_derivative().unwrap();
        let x = 0.37;
        let h = 1e-7;
        let mut t = 1e-3;
        while t < 1.0 - 1e-3 {
            let fd = (s.eval(t + h, Side::Right).evaluate(x) - s.eval(t - h, Side::Right).evaluate(x))
                / (2.0 * h);
            let exact = ds.eval(t, Side::Right).evaluate(x);
            let scale = 1.0 + exact.abs();
            assert!((fd - exact).abs() < 1e-3 * scale, "t={t}: {fd} vs {exact}");
            t += 7.3e-4;
        }
    }

    #[test]
    fn absorb_zero_is_identity() {
        let p = TrigPoly::sin(b(), 1, 1, 0.5);
        let eta = Schedule::constant(1.0, p.clone());
        let r = relax_level(&eta, 0.01, 4, &standard_generators(&b()), &make_control_space(&b()))
            .unwrap();
        let out = absorb_zeta(&r.eta_g, &r.zeta, 0.1).unwrap();
        for t in [0.0, 0.05, 0.5, 0.97, 1.0] {
            assert!(out.eval(t, Side::Right).approx_eq(&p, 1e-15));
        }
    }
}
