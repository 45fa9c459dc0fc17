//! Simulation, configuration search and Monte Carlo evaluation for a
//! reconfigurable intelligent surface used to improve physical-layer secrecy.

pub mod channel;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod optimizer;
pub mod radiation;
pub mod ris;

pub use error::{Error, Result};
