pub mod algebra;
pub mod building;
pub mod congruence;
mod error;
pub mod homology;
pub mod lattice;
pub mod verify;

pub use error::{Error, Result};
