//! Convexification span `F(N, G)` and the convex decomposition of its elements.
//!
//! `F(N, G)` is spanned by `eta + xi d xi~ + xi~ d xi` with `eta, xi` in `E_G` and
//! `xi~` a multiple of one of the generators of `N`. A vector of `F(N, G)` is
//! rewritten as a `G`-valued shift plus a convex combination of Burgers terms
//! `B(u + zeta_j)`, which is what fast oscillating controls average to.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;

use super::basis::{FrequencyBasis, FrequencyDomain, FrequencySet, LatticeFrequency};
use super::poly::{Coeffs, TrigPoly};
use super::saturation::saturation_decompose;
use super::TrigError;
use crate::linalg;

const ELIMINATION_TOL: f64 = 1e-10;

/// `eta + xi * d xi_tilde + xi_tilde * d xi`.
#[derive(Clone, Debug)]
pub struct SpanTerm {
    pub eta: TrigPoly,
    pub xi: TrigPoly,
    pub xi_tilde: TrigPoly,
}

impl SpanTerm {
    pub fn expand(&self) -> TrigPoly {
        self.eta.add(&bilinear(&self.xi, &self.xi_tilde))
    }
}

/// `xi d xi~ + xi~ d xi`, i.e. `d(xi xi~)`.
pub fn bilinear(xi: &TrigPoly, xi_tilde: &TrigPoly) -> TrigPoly {
    xi.multiply(&xi_tilde.derivative())
        .add(&xi_tilde.multiply(&xi.derivative()))
}

/// The four generators `sin(l1 x), cos(l1 x), sin(l2 x), cos(l2 x)` of `N`.
pub fn standard_generators(basis: &FrequencyBasis) -> Vec<TrigPoly> {
    vec![
        TrigPoly::sin(*basis, 1, 0, 1.0),
        TrigPoly::cos(*basis, 1, 0, 1.0),
        TrigPoly::sin(*basis, 0, 1, 1.0),
        TrigPoly::cos(*basis, 0, 1, 1.0),
    ]
}

/// Checks `N ⊂ E_G` and `B(N) ⊂ E_G`.
pub fn check_span_precondition(
    generators: &[TrigPoly],
    g: &dyn FrequencyDomain,
) -> Result<(), TrigError> {
    for gen in generators {
        for p in [gen.clone(), gen.burgers()] {
            if let Some((f, _)) = p.terms().find(|(f, _)| !g.contains(f)) {
                return Err(TrigError::SaturationPreconditionViolated {
                    n1: f.n1(),
                    n2: f.n2(),
                });
            }
        }
    }
    Ok(())
}

/// Coordinate of the function basis `{cos(l x), sin(l x)}`.
type Coord = (LatticeFrequency, bool);

fn coords_of(p: &TrigPoly) -> Vec<(Coord, f64)> {
    let mut out = Vec::new();
    for (f, c) in p.terms() {
        if c.cos != 0.0 {
            out.push(((*f, false), c.cos));
        }
        if c.sin != 0.0 {
            out.push(((*f, true), c.sin));
        }
    }
    out
}

fn basis_function(basis: &FrequencyBasis, f: &LatticeFrequency, is_sin: bool) -> TrigPoly {
    let c = if is_sin {
        Coeffs::new(0.0, 1.0)
    } else {
        Coeffs::new(1.0, 0.0)
    };
    TrigPoly::from_terms(*basis, [(*f, c)])
}

/// Largest frequency set `G'` with `E_G' ⊂ F(N, G)`.
pub fn convexification_span(
    generators: &[TrigPoly],
    g: &FrequencySet,
) -> Result<FrequencySet, TrigError> {
    check_span_precondition(generators, g)?;
    let basis = *g.basis();

    // products d(xi * xi~) with xi running over the basis functions of E_G,
    // projected onto the coordinates outside E_G
    let mut vectors: Vec<Vec<(Coord, f64)>> = Vec::new();
    let mut columns: BTreeSet<Coord> = BTreeSet::new();
    for gen in generators.iter().filter(|p| !p.is_zero()) {
        for f in g.iter() {
            for is_sin in [false, true] {
                if is_sin && f.is_zero() {
                    continue;
                }
                let v = bilinear(&basis_function(&basis, f, is_sin), gen);
                let outside: Vec<_> = coords_of(&v)
                    .into_iter()
                    .filter(|((freq, _), _)| !g.contains(freq))
                    .collect();
                if !outside.is_empty() {
                    columns.extend(outside.iter().map(|(c, _)| *c));
                    vectors.push(outside);
                }
            }
        }
    }

    let index: BTreeMap<Coord, usize> = columns.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut rows: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| {
            let mut row = vec![0.0; index.len()];
            for (c, val) in v {
                row[index[c]] = *val;
            }
            row
        })
        .collect();
    let pivots = linalg::rref(&mut rows, index.len(), ELIMINATION_TOL);

    let coord_list: Vec<Coord> = columns.into_iter().collect();
    let mut reachable: BTreeSet<Coord> = BTreeSet::new();
    for (row, &p) in rows.iter().zip(&pivots) {
        if row.iter().enumerate().all(|(j, v)| j == p || *v == 0.0) {
            reachable.insert(coord_list[p]);
        }
    }

    let mut out = g.clone();
    for &(f, is_sin) in &reachable {
        let both = if f.is_zero() {
            true
        } else {
            reachable.contains(&(f, !is_sin))
        };
        if both {
            out.insert(f);
        }
    }
    Ok(out)
}

/// One term `xi d xi~ + xi~ d xi` of a representation.
#[derive(Clone, Debug)]
pub struct RepTerm {
    pub xi: TrigPoly,
    pub xi_tilde: TrigPoly,
}

/// `eta1 = eta_tilde - sum_j (xi_j d xi~_j + xi~_j d xi_j)` with `eta_tilde, xi_j`
/// in `E_G` and `xi~_j` in `N`.
#[derive(Clone, Debug)]
pub struct Representation {
    pub eta_tilde: TrigPoly,
    pub terms: Vec<RepTerm>,
}

impl Representation {
    pub fn expand(&self) -> TrigPoly {
        let mut acc = self.eta_tilde.clone();
        for t in &self.terms {
            acc = acc.sub(&bilinear(&t.xi, &t.xi_tilde));
        }
        acc
    }
}

/// Scale of `gen` when it is a single pure sine (or cosine) at `freq`.
fn pure_scale(gen: &TrigPoly, freq: &LatticeFrequency, is_sin: bool) -> Option<f64> {
    if gen.len() != 1 {
        return None;
    }
    let (f, c) = gen.terms().next()?;
    if f != freq {
        return None;
    }
    match is_sin {
        true if c.cos == 0.0 => Some(c.sin),
        false if c.sin == 0.0 => Some(c.cos),
        _ => None,
    }
}

/// Greedy representation of `eta1` in the form above.
///
/// Components already in `E_G` go to `eta_tilde`; frequencies one order above
/// `G` use the lifting identities; whatever is left is solved for by
/// elimination over products whose outside-`G` support stays closed.
pub fn represent(
    eta1: &TrigPoly,
    generators: &[TrigPoly],
    g: &dyn FrequencyDomain,
) -> Result<Representation, TrigError> {
    let basis = *eta1.basis();
    let (_, outside) = eta1.split_by(|f| g.contains(f));
    let mut xi: Vec<TrigPoly> = vec![TrigPoly::zero(basis); generators.len()];

    // lifting identities
    let mut leftover = Vec::new();
    for (f, c) in outside.terms() {
        let handled = (|| {
            let id = saturation_decompose(f, &basis).ok()?;
            let (p1, p2) = id.lambda_prime;
            let (s1, s2) = id.lambda_second;
            let prime = basis.fold(p1, p2).0;
            let second = basis.fold(s1, s2).0;
            if !g.contains(&prime) || !(second.is_zero() || g.contains(&second)) {
                return None;
            }
            let (g1, g2) = id.shift_coords();
            let shift = basis.fold(g1, g2).0;
            let mut updates = Vec::new();
            for (coef, term, is_sin) in [(c.sin, &id.sine, true), (c.cos, &id.cosine, false)] {
                if coef == 0.0 {
                    continue;
                }
                let (xt_freq, xt_c) = term.xi_tilde.terms().next()?;
                debug_assert_eq!(*xt_freq, shift);
                let target = if is_sin { xt_c.sin } else { xt_c.cos };
                let (idx, scale) = generators
                    .iter()
                    .enumerate()
                    .find_map(|(i, gen)| pure_scale(gen, &shift, is_sin).map(|s| (i, s)))?;
                // coef * d(xi_s * xi~_s) = -d(xi * gen) with xi = -coef * k * xi_s
                let k = target / scale;
                updates.push((idx, term.xi.scale(-coef * k)));
            }
            Some(updates)
        })();
        match handled {
            Some(updates) => {
                for (i, p) in updates {
                    xi[i] = xi[i].add(&p);
                }
            }
            None => leftover.push((*f, *c)),
        }
    }

    if !leftover.is_empty() {
        let rest = TrigPoly::from_terms(basis, leftover);
        let rows: Vec<Coord> = coords_of(&rest).into_iter().map(|(c, _)| c).collect();
        let row_index: BTreeMap<Coord, usize> =
            rows.iter().enumerate().map(|(i, c)| (*c, i)).collect();

        let mut cols: Vec<(usize, TrigPoly, Vec<f64>)> = Vec::new();
        let mut seen = BTreeSet::new();
        for (gi, gen) in generators.iter().enumerate() {
            for (phi, _) in gen.terms() {
                for (lam, _) in rest.terms() {
                    let cands = [
                        basis.fold(lam.n1() + phi.n1(), lam.n2() + phi.n2()).0,
                        basis.fold(lam.n1() - phi.n1(), lam.n2() - phi.n2()).0,
                    ];
                    for a in cands {
                        if !g.contains(&a) {
                            continue;
                        }
                        for is_sin in [false, true] {
                            if (is_sin && a.is_zero()) || !seen.insert((gi, a, is_sin)) {
                                continue;
                            }
                            let bf = basis_function(&basis, &a, is_sin);
                            let v = bilinear(&bf, gen);
                            let mut col = vec![0.0; rows.len()];
                            let mut closed = true;
                            for ((freq, s), val) in coords_of(&v) {
                                if g.contains(&freq) {
                                    continue;
                                }
                                match row_index.get(&(freq, s)) {
                                    Some(&r) => col[r] = val,
                                    None => {
                                        closed = false;
                                        break;
                                    }
                                }
                            }
                            if closed && col.iter().any(|v| *v != 0.0) {
                                cols.push((gi, bf, col));
                            }
                        }
                    }
                }
            }
        }
        let rhs: Vec<f64> = coords_of(&rest).into_iter().map(|(_, v)| -v).collect();
        let columns: Vec<Vec<f64>> = cols.iter().map(|c| c.2.clone()).collect();
        let sol = if columns.is_empty() {
            None
        } else {
            linalg::solve_columns(&columns, &rhs, ELIMINATION_TOL)
        }
        .ok_or(TrigError::NotInSpan)?;
        for ((gi, bf, _), d) in cols.iter().zip(sol) {
            if d != 0.0 {
                xi[*gi] = xi[*gi].add(&bf.scale(d));
            }
        }
    }

    let mut eta_tilde = eta1.clone();
    let mut terms = Vec::new();
    for (gen, x) in generators.iter().zip(xi) {
        if x.is_zero() {
            continue;
        }
        eta_tilde = eta_tilde.add(&bilinear(&x, gen));
        terms.push(RepTerm {
            xi: x,
            xi_tilde: gen.clone(),
        });
    }
    let (inside, stray) = eta_tilde.split_by(|f| g.contains(f));
    let scale = 1.0 + eta1.max_coefficient();
    if stray.max_coefficient() > 1e-9 * scale {
        return Err(TrigError::NotInSpan);
    }
    // balance |xi| = |xi~| within each term; the product is unchanged
    for t in terms.iter_mut() {
        let s = (t.xi.amplitude_bound() / t.xi_tilde.amplitude_bound()).sqrt();
        if s.is_finite() && s > 0.0 && s != 1.0 {
            t.xi_tilde = t.xi_tilde.scale(s);
            t.xi = t.xi.scale(1.0 / s);
        }
    }
    Ok(Representation {
        eta_tilde: inside,
        terms,
    })
}

/// Output of [`convex_decompose`].
#[derive(Clone, Debug)]
pub struct ConvexDecomposition {
    /// `G`-valued shift.
    pub eta: TrigPoly,
    /// Convex weights, summing to one exactly.
    pub weights: Vec<Ratio<u64>>,
    /// `zeta_j`, with `zeta_{j+m} = -zeta_j`.
    pub zetas: Vec<TrigPoly>,
    pub epsilon: f64,
    /// `eps^2 sum_j B(xi_j)`, independent of the state.
    pub residual: TrigPoly,
    /// Amplitude bound of `residual`.
    pub residual_bound: f64,
    pub representation: Representation,
}

impl ConvexDecomposition {
    /// Number `m` of `+-` pairs.
    pub fn pairs(&self) -> usize {
        self.zetas.len() / 2
    }

    pub fn weight_sum(&self) -> Ratio<u64> {
        self.weights.iter().copied().sum()
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| *w.numer() as f64 / *w.denom() as f64)
            .collect()
    }

    /// `sum_j alpha_j zeta_j`.
    pub fn mean_zeta(&self) -> TrigPoly {
        let w = self.weights_f64();
        let scaled: Vec<TrigPoly> = self.zetas.iter().zip(&w).map(|(z, a)| z.scale(*a)).collect();
        TrigPoly::sum(*self.eta.basis(), &scaled)
    }

    /// `sum_j alpha_j B(zeta_j)`.
    pub fn mean_burgers(&self) -> TrigPoly {
        let w = self.weights_f64();
        let scaled: Vec<TrigPoly> = self
            .zetas
            .iter()
            .zip(&w)
            .map(|(z, a)| z.burgers().scale(*a))
            .collect();
        TrigPoly::sum(*self.eta.basis(), &scaled)
    }

    /// `eta1 - B(u) - (eta - sum_j alpha_j (B(u + zeta_j) - mu d^2 zeta_j))` for a
    /// given state `u`; equals `residual` for every `u`.
    pub fn defect(&self, eta1: &TrigPoly, u: &TrigPoly, mu: f64) -> TrigPoly {
        let w = self.weights_f64();
        let mut avg = Vec::with_capacity(self.zetas.len());
        for (z, a) in self.zetas.iter().zip(&w) {
            let shifted = u.add(z).burgers();
            let diff = z.nth_derivative(2).scale(mu);
            avg.push(shifted.sub(&diff).scale(*a));
        }
        let averaged = TrigPoly::sum(*u.basis(), &avg);
        eta1.sub(&u.burgers()).sub(&self.eta.sub(&averaged))
    }
}

/// Convex decomposition of `eta1 ∈ F(N, G)` with state-independent residual at
/// most `nu` (amplitude bound).
///
/// `eps` is the largest power of one half with `eps^2 |sum_j B(xi_j)| <= nu`.
pub fn convex_decompose(
    eta1: &TrigPoly,
    nu: f64,
    generators: &[TrigPoly],
    g: &dyn FrequencyDomain,
) -> Result<ConvexDecomposition, TrigError> {
    if !(nu > 0.0) {
        return Err(TrigError::InvalidTolerance(nu));
    }
    check_span_precondition(generators, g)?;
    let basis = *eta1.basis();
    let rep = represent(eta1, generators, g)?;

    let xi_burgers = TrigPoly::sum(basis, &rep.terms.iter().map(|t| t.xi.burgers()).collect::<Vec<_>>());
    let b0 = xi_burgers.amplitude_bound();
    let mut epsilon = 1.0f64;
    while epsilon * epsilon * b0 > nu {
        epsilon *= 0.5;
    }
    let residual = xi_burgers.scale(epsilon * epsilon);

    let inv2 = 1.0 / (epsilon * epsilon);
    let mut eta_parts = vec![rep.eta_tilde.clone()];
    eta_parts.extend(rep.terms.iter().map(|t| t.xi_tilde.burgers().scale(inv2)));
    let eta = TrigPoly::sum(basis, &eta_parts);

    let m = rep.terms.len().max(1);
    let root = (m as f64).sqrt();
    let mut zetas: Vec<TrigPoly> = rep
        .terms
        .iter()
        .map(|t| TrigPoly::linear(&t.xi, &t.xi_tilde, epsilon, 1.0 / epsilon).scale(root))
        .collect();
    if zetas.is_empty() {
        zetas.push(TrigPoly::zero(basis));
    }
    let negated: Vec<TrigPoly> = zetas.iter().map(|z| z.scale(-1.0)).collect();
    zetas.extend(negated);
    let weights = vec![Ratio::new(1u64, 2 * m as u64); 2 * m];

    Ok(ConvexDecomposition {
        eta,
        weights,
        zetas,
        epsilon,
        residual_bound: residual.amplitude_bound(),
        residual,
        representation: rep,
    })
}
