//! Product identities that lift `sin(lx)` and `cos(lx)` one lattice order up.
//!
//! For `l = l' + g` with a base frequency `g` (possibly negated) and
//! `l'' = l - 2g`:
//!
//! ```text
//! sin(l x) =  (l''/l) sin(l'' x) + (2/l) (sin(g x) d sin(l' x) + sin(l' x) d sin(g x))
//! cos(l x) = -(l''/l) cos(l'' x) + (2/l) (cos(g x) d sin(l' x) + sin(l' x) d cos(g x))
//! ```
//!
//! so both functions lie in `F(N, E_k)` whenever `l', l''` have order `<= k`.

use serde::Serialize;

use super::basis::{FrequencyBasis, LatticeFrequency};
use super::poly::TrigPoly;
use super::span::SpanTerm;
use super::TrigError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Shift {
    Lambda1,
    Lambda2,
}

/// Both lifting identities for one frequency.
#[derive(Clone, Debug)]
pub struct SaturationIdentity {
    pub lambda: LatticeFrequency,
    pub shift: Shift,
    /// `+1` or `-1`: the shift is `sign * lambda_i`.
    pub shift_sign: i64,
    /// Raw coordinates of `l' = l - g` (value may be negative).
    pub lambda_prime: (i64, i64),
    /// Raw coordinates of `l'' = l - 2g`.
    pub lambda_second: (i64, i64),
    pub sine: SpanTerm,
    pub cosine: SpanTerm,
}

impl SaturationIdentity {
    pub fn shift_coords(&self) -> (i64, i64) {
        match self.shift {
            Shift::Lambda1 => (self.shift_sign, 0),
            Shift::Lambda2 => (0, self.shift_sign),
        }
    }

    /// `sin(l x)` minus the right-hand side; zero when the identity holds.
    pub fn sine_residual(&self, basis: &FrequencyBasis) -> TrigPoly {
        let (n1, n2) = self.lambda.coords();
        TrigPoly::sin(*basis, n1, n2, 1.0).sub(&self.sine.expand())
    }

    pub fn cosine_residual(&self, basis: &FrequencyBasis) -> TrigPoly {
        let (n1, n2) = self.lambda.coords();
        TrigPoly::cos(*basis, n1, n2, 1.0).sub(&self.cosine.expand())
    }
}

/// Builds the lifting identities for `lambda`.
///
/// The `lambda1` shift is used when `|n1| >= 2`, otherwise the `lambda2` shift
/// when `|n2| >= 2`; in both cases `l'` and `l''` drop the order by one and two.
pub fn saturation_decompose(
    lambda: &LatticeFrequency,
    basis: &FrequencyBasis,
) -> Result<SaturationIdentity, TrigError> {
    if lambda.is_zero() {
        return Err(TrigError::DivisionByZero);
    }
    let (n1, n2) = lambda.coords();
    let (shift, sign) = if n1.abs() >= 2 {
        (Shift::Lambda1, n1.signum())
    } else if n2.abs() >= 2 {
        (Shift::Lambda2, n2.signum())
    } else {
        return Err(TrigError::NotDecomposable { n1, n2 });
    };
    let (g1, g2) = match shift {
        Shift::Lambda1 => (sign, 0),
        Shift::Lambda2 => (0, sign),
    };
    let prime = (n1 - g1, n2 - g2);
    let second = (n1 - 2 * g1, n2 - 2 * g2);
    let l = lambda.value();
    let l2 = basis.value(second.0, second.1);

    let sin_prime = TrigPoly::sin(*basis, prime.0, prime.1, 1.0);
    let sine = SpanTerm {
        eta: TrigPoly::sin(*basis, second.0, second.1, l2 / l),
        xi: sin_prime.clone(),
        xi_tilde: TrigPoly::sin(*basis, g1, g2, 2.0 / l),
    };
    let cosine = SpanTerm {
        eta: TrigPoly::cos(*basis, second.0, second.1, -l2 / l),
        xi: sin_prime,
        xi_tilde: TrigPoly::cos(*basis, g1, g2, 2.0 / l),
    };
    Ok(SaturationIdentity {
        lambda: *lambda,
        shift,
        shift_sign: sign,
        lambda_prime: prime,
        lambda_second: second,
        sine,
        cosine,
    })
}
