pub mod covers;
pub mod error;
pub mod field;
pub mod lift;
pub mod polygeom;
pub mod scaffold;
pub mod transversal;

pub use error::{LiftError, Result};
