//! Shared-entanglement advice protocols and their optimal deviations.

mod appendix_d;
mod circuit;
mod extensive;
mod normal;
pub mod random;
mod state;

pub use appendix_d::*;
pub use circuit::{Gate, GateOp, PlayerCircuit, Register, UNITARY_TOL};
pub use extensive::*;
pub use normal::*;
pub use state::{QuantumState, NORM_DRIFT_TOL, NORM_TOL};
