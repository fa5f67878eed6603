pub mod cli;
pub mod elliptic;
pub mod error;
pub mod fibration;
pub mod heights;
pub mod isogeny;
pub mod locus;
pub mod numerics;
pub mod periods;

pub use error::{Error, Result};
