//! Multiuser detection for asynchronous uplinks with disjoint-interval
//! sampling.
//!
//! [`model`] builds the sampling matrices and simulates received samples,
//! [`detectors`] holds the sequence, successive, belief-propagation and
//! zero-forcing detectors plus synchronous baselines, [`analysis`] has the
//! closed-form error-rate and delay-design tools, and [`harness`] runs
//! Monte-Carlo sweeps.

pub mod analysis;
pub mod detectors;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;

pub use error::{Error, Result};
