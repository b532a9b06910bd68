//! Continuity bounds for entropies and related quantities under energy or
//! rank constraints, with the numerical machinery to evaluate and test them.

pub mod afw;
pub mod bounds;
pub mod classical;
pub mod error;
pub mod hamiltonians;
pub mod harness;
pub mod linalg;
pub mod oscillator;
pub mod random;

pub use error::{Error, Result};
