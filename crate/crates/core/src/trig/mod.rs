//! Exact trigonometric polynomials over a two-frequency lattice.

mod basis;
mod poly;
mod saturation;
mod span;

pub use basis::{
    enumerate_lattice, make_control_space, make_frequency, FrequencyBasis, FrequencyDomain,
    FrequencySet, LatticeFrequency, OrderBall,
};
pub use poly::{Coeffs, TrigPoly, CANONICAL_REL_TOL};
pub use saturation::{saturation_decompose, SaturationIdentity, Shift};
pub use span::{
    bilinear, check_span_precondition, convexification_span, convex_decompose, represent,
    standard_generators, ConvexDecomposition, RepTerm, Representation, SpanTerm,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrigError {
    #[error("invalid frequency basis ({lambda1}, {lambda2}): need positive, finite, distinct values")]
    InvalidBasis { lambda1: f64, lambda2: f64 },
    #[error("frequency {n1}*l1 + {n2}*l2 = {value} is negative")]
    NegativeFrequency { n1: i64, n2: i64, value: f64 },
    #[error("frequency ({n1},{n2}) has no lifting identity: both coordinates are below 2 in size")]
    NotDecomposable { n1: i64, n2: i64 },
    #[error("lifting identity divides by the zero frequency")]
    DivisionByZero,
    #[error("generators leave the frequency set at ({n1},{n2})")]
    SaturationPreconditionViolated { n1: i64, n2: i64 },
    #[error("target is not in the convexification span")]
    NotInSpan,
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}
