pub mod diagform;
pub mod equivalence;
pub mod error;
pub mod ffield;
pub mod group;
pub mod groupring;
pub mod lattice;
pub mod literal;
pub mod pointwise;
pub mod powerclass;
pub mod sepform;
pub mod verify;

pub use error::{Error, Result};
