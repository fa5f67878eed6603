//! Modular polynomials, isogenies between fibers and dependence of sections.

pub mod dependence;
pub mod locus;
pub mod modpoly;

pub use dependence::{dependence_search, isogeny_scalar, CoverSection, DependenceQuery, Relation};
pub use locus::{legendre_isogeny_locus, legendre_j, locus_points, IsogenyLocus};
pub use modpoly::{is_isogenous, modular_poly, relative_residual, table_text, ModularPoly, DATA_ENV, SUPPORTED_LEVELS};
