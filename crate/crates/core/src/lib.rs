//! Quantum particle in a one-dimensional box with general self-adjoint
//! boundary conditions.

pub mod boundary;
pub mod carpet;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod model;
pub mod movingwalls;
pub mod quadrature;
pub mod spectral;
pub mod trotter;

pub use error::{Error, Result};
