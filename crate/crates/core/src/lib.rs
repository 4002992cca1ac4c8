//! Classical and quantum correlated equilibria in small complete-information games.

pub mod classical;
pub mod distribution;
pub mod error;
pub mod games;
pub mod io;
pub mod linalg;
pub mod quantum;
pub mod report;
pub mod scenarios;

pub use distribution::Distribution;
pub use error::{Error, Result};
pub use report::{EquilibriumReport, Verdict};
