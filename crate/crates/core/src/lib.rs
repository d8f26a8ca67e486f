//! Pseudo-spectral toolkit for the low Mach number limit of quantum
//! hydrodynamics on the periodic torus.
//!
//! The crate integrates the scaled QHD system through its nonlinear
//! Schrödinger formulation, the incompressible Euler limit, and the
//! oscillation profile driven by the resonant bilinear forms, then monitors
//! the relative entropy between them.

pub mod acoustic;
pub mod csv;
pub mod entropy;
pub mod error;
pub mod resonance;
pub mod solvers;
pub mod spectral;

pub use error::{Error, Result};
