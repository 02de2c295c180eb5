use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::basis::{FrequencyBasis, FrequencySet, LatticeFrequency};

/// Relative threshold below which coefficients are dropped from canonical form.
pub const CANONICAL_REL_TOL: f64 = 1e-14;

/// Cosine and sine coefficients of one frequency.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Coeffs {
    pub cos: f64,
    pub sin: f64,
}

impl Coeffs {
    pub fn new(cos: f64, sin: f64) -> Self {
        Self { cos, sin }
    }

    pub fn amplitude(&self) -> f64 {
        self.cos.hypot(self.sin)
    }
}

/// Real trigonometric polynomial `sum a cos(l x) + b sin(l x)` over lattice
/// frequencies `l`.
///
/// Always held in canonical form: distinct frequencies, zero sine coefficient at
/// frequency zero, no stored all-zero terms.
#[derive(Clone, PartialEq)]
pub struct TrigPoly {
    basis: FrequencyBasis,
    terms: BTreeMap<LatticeFrequency, Coeffs>,
}

impl TrigPoly {
    pub fn zero(basis: FrequencyBasis) -> Self {
        Self {
            basis,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(basis: FrequencyBasis, c: f64) -> Self {
        Self::from_terms(basis, [(LatticeFrequency::ZERO, Coeffs::new(c, 0.0))])
    }

    /// `c * cos(l x)` for raw (possibly negative) coordinates of `l`.
    pub fn cos(basis: FrequencyBasis, n1: i64, n2: i64, c: f64) -> Self {
        let (f, _) = basis.fold(n1, n2);
        Self::from_terms(basis, [(f, Coeffs::new(c, 0.0))])
    }

    /// `c * sin(l x)` for raw (possibly negative) coordinates of `l`.
    pub fn sin(basis: FrequencyBasis, n1: i64, n2: i64, c: f64) -> Self {
        let (f, s) = basis.fold(n1, n2);
        Self::from_terms(basis, [(f, Coeffs::new(0.0, s * c))])
    }

    /// Builds a canonical polynomial, merging repeated frequencies.
    pub fn from_terms(
        basis: FrequencyBasis,
        terms: impl IntoIterator<Item = (LatticeFrequency, Coeffs)>,
    ) -> Self {
        let mut acc: BTreeMap<LatticeFrequency, Coeffs> = BTreeMap::new();
        for (f, c) in terms {
            let e = acc.entry(f).or_default();
            e.cos += c.cos;
            e.sin += c.sin;
        }
        let mut p = Self { basis, terms: acc };
        p.canonicalize();
        p
    }

    fn canonicalize(&mut self) {
        if let Some(z) = self.terms.get_mut(&LatticeFrequency::ZERO) {
            z.sin = 0.0;
        }
        let scale = self
            .terms
            .values()
            .map(|c| c.cos.abs().max(c.sin.abs()))
            .fold(0.0, f64::max);
        let cut = CANONICAL_REL_TOL * scale;
        self.terms.retain(|_, c| {
            if c.cos.abs() <= cut {
                c.cos = 0.0;
            }
            if c.sin.abs() <= cut {
                c.sin = 0.0;
            }
            c.cos != 0.0 || c.sin != 0.0
        });
    }

    pub fn basis(&self) -> &FrequencyBasis {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LatticeFrequency, &Coeffs)> {
        self.terms.iter()
    }

    pub fn coeffs(&self, freq: &LatticeFrequency) -> Coeffs {
        self.terms.get(freq).copied().unwrap_or_default()
    }

    pub fn frequencies(&self) -> FrequencySet {
        let mut set = FrequencySet::new(self.basis);
        for f in self.terms.keys() {
            set.insert(*f);
        }
        set
    }

    pub fn max_order(&self) -> u64 {
        self.terms.keys().map(|f| f.order()).max().unwrap_or(0)
    }

    pub fn max_frequency(&self) -> f64 {
        self.terms.keys().map(|f| f.value()).fold(0.0, f64::max)
    }

    fn check_basis(&self, other: &TrigPoly) {
        assert_eq!(
            self.basis, other.basis,
            "trigonometric polynomials over different bases"
        );
    }

    /// `c1 * p + c2 * q`.
    pub fn linear(p: &TrigPoly, q: &TrigPoly, c1: f64, c2: f64) -> TrigPoly {
        p.check_basis(q);
        let a = p.terms.iter().map(|(f, k)| (*f, Coeffs::new(c1 * k.cos, c1 * k.sin)));
        let b = q.terms.iter().map(|(f, k)| (*f, Coeffs::new(c2 * k.cos, c2 * k.sin)));
        Self::from_terms(p.basis, a.chain(b))
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        Self::linear(self, other, 1.0, 1.0)
    }

    pub fn sub(&self, other: &TrigPoly) -> TrigPoly {
        Self::linear(self, other, 1.0, -1.0)
    }

    pub fn scale(&self, c: f64) -> TrigPoly {
        Self::from_terms(
            self.basis,
            self.terms
                .iter()
                .map(|(f, k)| (*f, Coeffs::new(c * k.cos, c * k.sin))),
        )
    }

    /// Sum of many polynomials over one basis.
    pub fn sum<'a>(basis: FrequencyBasis, items: impl IntoIterator<Item = &'a TrigPoly>) -> Self {
        let mut all = Vec::new();
        for p in items {
            assert_eq!(basis, p.basis, "trigonometric polynomials over different bases");
            all.extend(p.terms.iter().map(|(f, c)| (*f, *c)));
        }
        Self::from_terms(basis, all)
    }

    /// Termwise `d/dx`.
    pub fn derivative(&self) -> TrigPoly {
        Self::from_terms(
            self.basis,
            self.terms.iter().map(|(f, c)| {
                let l = f.value();
                (*f, Coeffs::new(l * c.sin, -l * c.cos))
            }),
        )
    }

    pub fn nth_derivative(&self, order: u32) -> TrigPoly {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    /// Exact product via product-to-sum identities.
    pub fn multiply(&self, other: &TrigPoly) -> TrigPoly {
        self.check_basis(other);
        let b = self.basis;
        let mut out = Vec::with_capacity(4 * self.len() * other.len());
        for (fa, ca) in &self.terms {
            for (fb, cb) in &other.terms {
                let (sum, _) = b.fold(fa.n1() + fb.n1(), fa.n2() + fb.n2());
                let (diff, s) = b.fold(fa.n1() - fb.n1(), fa.n2() - fb.n2());
                // cos A cos B, sin A sin B
                let cc = 0.5 * ca.cos * cb.cos;
                let ss = 0.5 * ca.sin * cb.sin;
                out.push((sum, Coeffs::new(cc - ss, 0.0)));
                out.push((diff, Coeffs::new(cc + ss, 0.0)));
                // sin A cos B, cos A sin B; sin(A - B) = s sin|A - B|
                let sc = 0.5 * ca.sin * cb.cos;
                let cs = 0.5 * ca.cos * cb.sin;
                out.push((sum, Coeffs::new(0.0, sc + cs)));
                out.push((diff, Coeffs::new(0.0, s * (sc - cs))));
            }
        }
        Self::from_terms(b, out)
    }

    /// Burgers nonlinearity `p * dp/dx`.
    pub fn burgers(&self) -> TrigPoly {
        self.multiply(&self.derivative())
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|(f, c)| {
                let (s, co) = (f.value() * x).sin_cos();
                c.cos * co + c.sin * s
            })
            .sum()
    }

    pub fn evaluate_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.evaluate(x)).collect()
    }

    /// `sum sqrt(a^2 + b^2)`: an upper bound for the sup norm over the line.
    pub fn amplitude_bound(&self) -> f64 {
        self.terms.values().map(Coeffs::amplitude).sum()
    }

    /// Largest absolute coefficient.
    pub fn max_coefficient(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.cos.abs().max(c.sin.abs()))
            .fold(0.0, f64::max)
    }

    /// Splits into the part with frequencies accepted by `keep` and the rest.
    pub fn split_by(&self, mut keep: impl FnMut(&LatticeFrequency) -> bool) -> (TrigPoly, TrigPoly) {
        let (a, b): (Vec<_>, Vec<_>) = self
            .terms
            .iter()
            .map(|(f, c)| (*f, *c))
            .partition(|(f, _)| keep(f));
        (Self::from_terms(self.basis, a), Self::from_terms(self.basis, b))
    }

    /// Mean over the line (the zero-frequency coefficient).
    pub fn mean(&self) -> f64 {
        self.coeffs(&LatticeFrequency::ZERO).cos
    }

    /// True when `self - other` vanishes up to `tol` in every coefficient.
    pub fn approx_eq(&self, other: &TrigPoly, tol: f64) -> bool {
        self.sub(other).max_coefficient() <= tol
    }
}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (freq, c) in &self.terms {
            for (val, name) in [(c.cos, "cos"), (c.sin, "sin")] {
                if val == 0.0 {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                if freq.is_zero() {
                    write!(f, "{val}")?;
                } else {
                    write!(f, "{val}*{name}[{},{}]", freq.n1(), freq.n2())?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TrigPolyRepr {
    basis: FrequencyBasis,
    terms: Vec<TermRecord>,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    n1: i64,
    n2: i64,
    cos: f64,
    sin: f64,
}

impl Serialize for TrigPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TrigPolyRepr {
            basis: self.basis,
            terms: self
                .terms
                .iter()
                .map(|(f, c)| TermRecord {
                    n1: f.n1(),
                    n2: f.n2(),
                    cos: c.cos,
                    sin: c.sin,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = TrigPolyRepr::deserialize(d)?;
        let basis = repr.basis;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            let (f, s) = basis.fold(t.n1, t.n2);
            // cos is even, sin is odd under folding
            terms.push((f, Coeffs::new(t.cos, s * t.sin)));
        }
        Ok(TrigPoly::from_terms(basis, terms))
    }
}
