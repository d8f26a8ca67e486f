//! Time integrators for the QHD, Euler and limit systems, and initial data.

pub mod euler;
pub mod initial;
pub mod limit;
pub mod nls;
pub mod state;

pub use euler::{euler_pressure, euler_rhs, euler_state, euler_step};
pub use initial::{build_initial_data, InitialDataSpec, Preparation, Preset};
pub use limit::limit_step;
pub use nls::{hamiltonian, nls_default_dt, nls_step};
pub use state::{madelung, EulerState, QhdParams, QhdState, WaveFunction};
