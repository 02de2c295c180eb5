use std::collections::BTreeSet;

use burgers_lab::harness::max_gap;
use burgers_lab::trig::{
    convexification_span, enumerate_lattice, make_control_space, saturation_decompose,
    standard_generators, FrequencyBasis, FrequencyDomain, TrigPoly,
};
use proptest::prelude::*;

fn basis() -> FrequencyBasis {
    FrequencyBasis::unit_sqrt2()
}

/// Brute force: every `n1 + n2 sqrt2 >= 0` with `|n1| + |n2| <= k`.
fn lattice_oracle(k: i64) -> Vec<f64> {
    let s2 = 2f64.sqrt();
    let mut seen = BTreeSet::new();
    for n1 in -k..=k {
        for n2 in -k..=k {
            if n1.abs() + n2.abs() <= k && n1 as f64 + n2 as f64 * s2 >= -1e-12 {
                seen.insert((n1, n2));
            }
        }
    }
    // (n1, n2) and (-n1, -n2) only coincide at zero
    let mut v: Vec<f64> = seen
        .into_iter()
        .map(|(a, b)| (a as f64 + b as f64 * s2).abs())
        .collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v
}

#[test]
fn lattice_matches_brute_force() {
    for k in [1u64, 2, 3, 6] {
        let mut got: Vec<f64> = enumerate_lattice(k, &basis()).iter().map(|f| f.value()).collect();
        got.sort_by(f64::total_cmp);
        let want = lattice_oracle(k as i64);
        assert_eq!(got.len(), want.len(), "k = {k}");
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn control_space_has_dimension_eleven() {
    assert_eq!(make_control_space(&basis()).dimension(), 11);
}

#[test]
fn dense_lattice_has_small_gaps_below_five() {
    let values: Vec<f64> = enumerate_lattice(30, &basis()).iter().map(|f| f.value()).collect();
    let gap = max_gap(&values, 5.0);
    assert!(gap < 0.1, "{gap}");
}

#[test]
fn iterated_span_reaches_order_five() {
    let gens = standard_generators(&basis());
    let mut g = make_control_space(&basis());
    for k in 1..=5 {
        g = convexification_span(&gens, &g).unwrap();
        for f in enumerate_lattice(k, &basis()).iter() {
            assert!(g.contains(f), "{f} missing after {k} iterations");
        }
    }
}

#[test]
fn lifting_identities_hold_pointwise() {
    for f in enumerate_lattice(6, &basis()).iter() {
        let Ok(id) = saturation_decompose(f, &basis()) else {
            assert!(f.n1().abs() < 2 && f.n2().abs() < 2, "{f} should decompose");
            continue;
        };
        let (s, c) = (id.sine.expand(), id.cosine.expand());
        for i in 0..40 {
            let x = -7.0 + 0.35 * i as f64;
            let (sl, cl) = (f.value() * x).sin_cos();
            assert!((s.evaluate(x) - sl).abs() < 1e-12, "sin {f} at {x}");
            assert!((c.evaluate(x) - cl).abs() < 1e-12, "cos {f} at {x}");
        }
    }
}

fn arb_poly() -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec((-3i64..=3, -3i64..=3, -1.0f64..1.0, -1.0f64..1.0), 0..5).prop_map(
        |terms| {
            let b = basis();
            terms.into_iter().fold(TrigPoly::zero(b), |p, (n1, n2, a, s)| {
                p.add(&TrigPoly::cos(b, n1, n2, a)).add(&TrigPoly::sin(b, n1, n2, s))
            })
        },
    )
}

proptest! {
    #[test]
    fn multiplication_commutes(p in arb_poly(), q in arb_poly()) {
        let scale = 1.0 + p.amplitude_bound() * q.amplitude_bound();
        prop_assert!(p.multiply(&q).approx_eq(&q.multiply(&p), 1e-13 * scale));
    }

    #[test]
    fn leibniz_rule(p in arb_poly(), q in arb_poly()) {
        let lhs = p.multiply(&q).derivative();
        let rhs = p.derivative().multiply(&q).add(&p.multiply(&q.derivative()));
        let scale = 1.0 + lhs.max_coefficient();
        prop_assert!(lhs.approx_eq(&rhs, 1e-12 * scale));
    }

    #[test]
    fn amplitude_bound_dominates_samples(p in arb_poly(), x in -50.0f64..50.0) {
        prop_assert!(p.evaluate(x).abs() <= p.amplitude_bound() + 1e-12);
    }

    #[test]
    fn frequencies_stay_in_the_order_ball(p in arb_poly(), q in arb_poly()) {
        let r = p.multiply(&q);
        prop_assert!(r.max_order() <= p.max_order() + q.max_order());
    }
}
