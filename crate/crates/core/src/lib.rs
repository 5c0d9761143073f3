//! Discrete-outcome quantum sensor networks: `N` qubit detectors, at most one
//! of which picks up the phase `U = diag(e^{i theta}, e^{-i theta})`.
//!
//! The crate builds probe states and hypothesis ensembles, constructs
//! minimum-error, unambiguous and pretty-good measurements, and checks every
//! closed-form probability against brute-force evaluation.

pub mod discrimination;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
mod sampling;

pub use error::{Error, Result};
pub use sampling::DEFAULT_SEED;
