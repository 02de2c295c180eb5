//! Low-mode trigonometric controls for the viscous Burgers equation.

pub mod control;
pub mod harness;
mod linalg;
pub mod quad;
pub mod smooth;
pub mod solver;
pub mod trig;
