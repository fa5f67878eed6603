//! Double elliptic fibration of a quartic surface by two pencils of planes.

pub mod double;
pub mod form;
pub mod nagell;
pub mod orbit;
pub mod seeds;
pub mod surface;

pub use double::{fermat_double_fibration, DoubleFibration, Fiber, Generator, LinePencilFibration};
pub use form::Form;
pub use nagell::CubicReduction;
pub use orbit::{default_match_tol, refine_to_surface, OrbitRecord, OrbitStatus, OrbitStep, Schedule, ScheduleKind, Step};
pub use seeds::TorsionSeed;
pub use surface::{Coord, Line, QuarticSurface, SurfacePoint};
