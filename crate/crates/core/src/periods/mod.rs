//! Period lattices, elliptic logarithms, Betti coordinates and monodromy.

pub mod ellog;
pub mod lattice;
pub mod monodromy;
pub mod weierstrass;

pub use ellog::{betti_coords, carlson_rf, elliptic_log, elliptic_log_by_inversion, BettiCoord, EllipticLog};
pub use lattice::{period_lattice, two_torsion_abscissas, PeriodBasis};
pub use monodromy::{continue_basis, monodromy, MonodromyMatrix, ParamPath};
pub use weierstrass::{exp_map, lattice_curve_coefficients, wp_and_derivative};
