//! Weierstrass curves, group law, division polynomials and families.

pub mod curve;
pub mod divpoly;
pub mod family;

pub use curve::{point_to_complex, Curve, Point, ScalarKind, DEFAULT_TORSION_BOUND};
pub use divpoly::{division_polynomial, division_polynomial_over, reduced_value, DivisionPoly};
pub use family::{CurveFamily, Section};
