//! Boundary-shifted Petrov-Galerkin finite elements for the Poisson problem
//! on domains with curved boundaries.

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod linsolve;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod spaces;
pub mod sparse;

pub use error::{Error, Result};
