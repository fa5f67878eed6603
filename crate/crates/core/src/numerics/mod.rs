//! Multiprecision kernel: complex numbers, polynomials, rational functions,
//! AGM, root finding and exact factorization.

pub mod agm;
pub mod complex;
pub mod factor;
pub mod field;
pub mod poly;
pub mod quadrature;
pub mod ratfunc;
pub mod rational;
pub mod roots;

pub use agm::agm;
pub use complex::{BigComplex, DEFAULT_PRECISION, MIN_PRECISION};
pub use field::{negligible, Field, Ring};
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use roots::{newton_refine, poly_roots};
pub use rug::{Float, Integer, Rational};
