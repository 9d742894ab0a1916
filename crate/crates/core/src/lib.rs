//! Correlated versus independent shadowing in Poisson and Matern cluster
//! networks.
//!
//! The crate samples base-station patterns and obstacle fields, assigns
//! per-station attenuations under grid, cluster and segment shadowing,
//! evaluates the resulting interference transforms numerically, and
//! estimates coverage, throughput and local delay by Monte Carlo.

pub mod analytic;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod geometry;
pub mod quadrature;
pub mod rng;
pub mod shadowing;
pub mod simulate;
pub mod special;

pub use error::{Error, Result};
pub use rng::Seed;
pub use shadowing::CorrelationMode;
