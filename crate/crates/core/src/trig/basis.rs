//! Frequency lattice generated by two incommensurable base frequencies.
//!
//! A frequency `n1*l1 + n2*l2` is identified by its integer coordinates; the
//! real value is only used for ordering, evaluation and sign decisions. Two
//! frequencies are equal exactly when their coordinates are equal.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::TrigError;

/// Pair of base frequencies `(lambda1, lambda2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyBasis {
    lambda1: f64,
    lambda2: f64,
}

impl FrequencyBasis {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self, TrigError> {
        let ok = |l: f64| l.is_finite() && l > 0.0;
        if !ok(lambda1) || !ok(lambda2) || lambda1 == lambda2 {
            return Err(TrigError::InvalidBasis { lambda1, lambda2 });
        }
        Ok(Self { lambda1, lambda2 })
    }

    /// The basis `(1, sqrt 2)` used throughout the examples and tests.
    pub fn unit_sqrt2() -> Self {
        Self {
            lambda1: 1.0,
            lambda2: std::f64::consts::SQRT_2,
        }
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// Real value `n1*lambda1 + n2*lambda2` (may be negative).
    pub fn value(&self, n1: i64, n2: i64) -> f64 {
        n1 as f64 * self.lambda1 + n2 as f64 * self.lambda2
    }

    /// Folds raw coordinates onto the nonnegative half of the lattice.
    ///
    /// Returns the folded frequency and the sign `s` with `raw = s * folded`.
    pub fn fold(&self, n1: i64, n2: i64) -> (LatticeFrequency, f64) {
        let v = self.value(n1, n2);
        if (n1, n2) == (0, 0) {
            return (LatticeFrequency::ZERO, 1.0);
        }
        if v < 0.0 {
            (
                LatticeFrequency {
                    n1: -n1,
                    n2: -n2,
                    value: -v,
                },
                -1.0,
            )
        } else {
            (LatticeFrequency { n1, n2, value: v }, 1.0)
        }
    }
}

/// Wire form: both base frequencies as decimal strings.
#[derive(Serialize, Deserialize)]
struct BasisRepr {
    lambda1: String,
    lambda2: String,
}

impl Serialize for FrequencyBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        BasisRepr {
            lambda1: format!("{}", self.lambda1),
            lambda2: format!("{}", self.lambda2),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FrequencyBasis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = BasisRepr::deserialize(d)?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| serde::de::Error::custom(format!("bad frequency {s:?}: {e}")))
        };
        let (l1, l2) = (parse(&repr.lambda1)?, parse(&repr.lambda2)?);
        FrequencyBasis::new(l1, l2).map_err(serde::de::Error::custom)
    }
}

/// A nonnegative lattice frequency `n1*lambda1 + n2*lambda2`.
///
/// Equality, hashing and ordering use the coordinates only.
#[derive(Clone, Copy, Debug)]
pub struct LatticeFrequency {
    n1: i64,
    n2: i64,
    value: f64,
}

impl LatticeFrequency {
    pub const ZERO: LatticeFrequency = LatticeFrequency {
        n1: 0,
        n2: 0,
        value: 0.0,
    };

    pub fn n1(&self) -> i64 {
        self.n1
    }

    pub fn n2(&self) -> i64 {
        self.n2
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn coords(&self) -> (i64, i64) {
        (self.n1, self.n2)
    }

    /// Lattice order `|n1| + |n2|`.
    pub fn order(&self) -> u64 {
        self.n1.unsigned_abs() + self.n2.unsigned_abs()
    }

    pub fn is_zero(&self) -> bool {
        self.n1 == 0 && self.n2 == 0
    }

    /// `j * self` as a lattice element (`j >= 0`).
    pub fn multiple(&self, j: i64, basis: &FrequencyBasis) -> LatticeFrequency {
        assert!(j >= 0, "negative multiple");
        basis.fold(j * self.n1, j * self.n2).0
    }
}

impl PartialEq for LatticeFrequency {
    fn eq(&self, other: &Self) -> bool {
        self.coords() == other.coords()
    }
}

impl Eq for LatticeFrequency {}

impl Hash for LatticeFrequency {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords().hash(state)
    }
}

impl PartialOrd for LatticeFrequency {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LatticeFrequency {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords().cmp(&other.coords())
    }
}

impl fmt::Display for LatticeFrequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})={:.6}", self.n1, self.n2, self.value)
    }
}

/// Builds the frequency `n1*lambda1 + n2*lambda2`; it must be nonnegative.
pub fn make_frequency(
    n1: i64,
    n2: i64,
    basis: &FrequencyBasis,
) -> Result<LatticeFrequency, TrigError> {
    let value = basis.value(n1, n2);
    if (n1, n2) != (0, 0) && value < 0.0 {
        return Err(TrigError::NegativeFrequency { n1, n2, value });
    }
    Ok(LatticeFrequency { n1, n2, value })
}

/// Membership test for a (possibly infinite) set of lattice frequencies.
pub trait FrequencyDomain {
    fn contains(&self, freq: &LatticeFrequency) -> bool;
}

/// `Lambda_k`: every nonnegative lattice frequency of order at most `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderBall(pub u64);

impl FrequencyDomain for OrderBall {
    fn contains(&self, freq: &LatticeFrequency) -> bool {
        freq.order() <= self.0
    }
}

/// Finite set of nonnegative lattice frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencySet {
    basis: FrequencyBasis,
    members: BTreeSet<LatticeFrequency>,
}

impl FrequencySet {
    pub fn new(basis: FrequencyBasis) -> Self {
        Self {
            basis,
            members: BTreeSet::new(),
        }
    }

    pub fn from_coords(
        basis: FrequencyBasis,
        coords: impl IntoIterator<Item = (i64, i64)>,
    ) -> Result<Self, TrigError> {
        let mut set = Self::new(basis);
        for (n1, n2) in coords {
            set.insert(make_frequency(n1, n2, &basis)?);
        }
        Ok(set)
    }

    pub fn basis(&self) -> &FrequencyBasis {
        &self.basis
    }

    pub fn insert(&mut self, freq: LatticeFrequency) -> bool {
        self.members.insert(freq)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LatticeFrequency> {
        self.members.iter()
    }

    /// Members sorted by increasing real value.
    pub fn sorted_by_value(&self) -> Vec<LatticeFrequency> {
        let mut v: Vec<_> = self.members.iter().copied().collect();
        v.sort_by(|a, b| a.value.total_cmp(&b.value));
        v
    }

    /// Dimension of `E_set`: two per nonzero frequency, one for zero.
    pub fn dimension(&self) -> usize {
        self.members
            .iter()
            .map(|f| if f.is_zero() { 1 } else { 2 })
            .sum()
    }

    pub fn is_subset(&self, other: &FrequencySet) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn union(&self, other: &FrequencySet) -> FrequencySet {
        FrequencySet {
            basis: self.basis,
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn max_order(&self) -> u64 {
        self.members.iter().map(|f| f.order()).max().unwrap_or(0)
    }
}

impl FrequencyDomain for FrequencySet {
    fn contains(&self, freq: &LatticeFrequency) -> bool {
        self.members.contains(freq)
    }
}

#[derive(Serialize, Deserialize)]
struct FrequencySetRepr {
    basis: FrequencyBasis,
    frequencies: Vec<FrequencyRecord>,
}

#[derive(Serialize, Deserialize)]
struct FrequencyRecord {
    n1: i64,
    n2: i64,
    #[serde(default, skip_deserializing)]
    value: f64,
}

impl Serialize for LatticeFrequency {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FrequencyRecord {
            n1: self.n1,
            n2: self.n2,
            value: self.value,
        }
        .serialize(s)
    }
}

impl Serialize for FrequencySet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FrequencySetRepr {
            basis: self.basis,
            frequencies: self
                .sorted_by_value()
                .into_iter()
                .map(|f| FrequencyRecord {
                    n1: f.n1,
                    n2: f.n2,
                    value: f.value,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FrequencySet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = FrequencySetRepr::deserialize(d)?;
        FrequencySet::from_coords(repr.basis, repr.frequencies.iter().map(|r| (r.n1, r.n2)))
            .map_err(serde::de::Error::custom)
    }
}

/// The six-frequency control set `{0, l1, l2, 2l1, 2l2, l1+l2}`.
pub fn make_control_space(basis: &FrequencyBasis) -> FrequencySet {
    FrequencySet::from_coords(*basis, [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1)])
        .expect("control-space coordinates are nonnegative")
}

/// Enumerates `Lambda_k` exactly.
pub fn enumerate_lattice(k: u64, basis: &FrequencyBasis) -> FrequencySet {
    let k = k as i64;
    let mut set = FrequencySet::new(*basis);
    for n1 in -k..=k {
        let rest = k - n1.abs();
        for n2 in -rest..=rest {
            if let Ok(f) = make_frequency(n1, n2, basis) {
                set.insert(f);
            }
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn basis_vector_and_difference() {
        let b = FrequencyBasis::unit_sqrt2();
        let f = make_frequency(1, 0, &b).unwrap();
        assert_eq!(f.value(), 1.0);
        assert_eq!(f.order(), 1);

        let d = make_frequency(-1, 1, &b).unwrap();
        assert!((d.value() - (SQRT2 - 1.0)).abs() < 1e-15);
        assert!((d.value() - 0.4142).abs() < 1e-4);
        assert_eq!(d.order(), 2);
    }

    #[test]
    fn negative_frequency_rejected() {
        let b = FrequencyBasis::unit_sqrt2();
        assert!(matches!(
            make_frequency(1, -1, &b),
            Err(TrigError::NegativeFrequency { .. })
        ));
    }

    #[test]
    fn invalid_basis() {
        assert!(FrequencyBasis::new(1.0, 1.0).is_err());
        assert!(FrequencyBasis::new(-1.0, 2.0).is_err());
        assert!(FrequencyBasis::new(f64::NAN, 2.0).is_err());
    }

    #[test]
    fn control_space_dimension_is_eleven() {
        let b = FrequencyBasis::unit_sqrt2();
        let lam = make_control_space(&b);
        assert_eq!(lam.len(), 6);
        assert_eq!(lam.dimension(), 11);
        let values: Vec<f64> = lam.sorted_by_value().iter().map(|f| f.value()).collect();
        let expected = [0.0, 1.0, SQRT2, 2.0, 1.0 + SQRT2, 2.0 * SQRT2];
        for (v, e) in values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-15);
        }
        assert!(lam.iter().all(|f| f.order() <= 2));
        assert!(lam.is_subset(&enumerate_lattice(2, &b)));
    }

    // brute force over the integer square, independent of the diamond loop
    fn brute(k: i64, b: &FrequencyBasis) -> BTreeSet<(i64, i64)> {
        let mut out = BTreeSet::new();
        for n1 in -k..=k {
            for n2 in -k..=k {
                if n1.abs() + n2.abs() <= k && b.value(n1, n2) >= 0.0 {
                    out.insert((n1, n2));
                }
            }
        }
        out
    }

    #[test]
    fn small_lattices_match_brute_force() {
        let b = FrequencyBasis::unit_sqrt2();
        let l1 = enumerate_lattice(1, &b);
        let v1: Vec<f64> = l1.sorted_by_value().iter().map(|f| f.value()).collect();
        assert_eq!(v1, vec![0.0, 1.0, SQRT2]);

        let l2 = enumerate_lattice(2, &b);
        assert_eq!(l2.len(), 7);
        let v2: Vec<f64> = l2.sorted_by_value().iter().map(|f| f.value()).collect();
        let e2 = [0.0, SQRT2 - 1.0, 1.0, SQRT2, 2.0, 1.0 + SQRT2, 2.0 * SQRT2];
        for (v, e) in v2.iter().zip(e2) {
            assert!((v - e).abs() < 1e-14);
        }
        for k in 1..=8 {
            let got: BTreeSet<_> = enumerate_lattice(k, &b).iter().map(|f| f.coords()).collect();
            assert_eq!(got, brute(k as i64, &b), "k = {k}");
        }
    }

    #[test]
    fn lattices_are_nested() {
        let b = FrequencyBasis::unit_sqrt2();
        let mut prev = enumerate_lattice(1, &b);
        for k in 2..=10 {
            let next = enumerate_lattice(k, &b);
            assert!(prev.is_subset(&next));
            assert!(next.len() >= prev.len());
            prev = next;
        }
    }

    #[test]
    fn serde_round_trip_keeps_coordinates() {
        let b = FrequencyBasis::unit_sqrt2();
        let set = enumerate_lattice(3, &b);
        let json = serde_json::to_string(&set).unwrap();
        assert!(json.contains("\"lambda2\":\"1.4142135623730951\""));
        let back: FrequencySet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, set);
    }
}
