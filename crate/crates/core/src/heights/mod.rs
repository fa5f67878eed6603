//! Weil and canonical heights, and empirical torsion-parameter tables.

pub mod canonical;
pub mod table;
pub mod weil;

pub use canonical::{canonical_height, canonical_height_prec};
pub use table::{exact_parameter_table, format_poly, masser_fit, silverman_table, HeightRow, HeightTable, MasserFit};
pub use weil::{integer_ln, weil_height_algebraic, weil_height_rational, AlgebraicNumber};
