//! Configured experiments: JSON configs, sweep execution, CSV output and
//! property verification suites.

pub mod config;
pub mod csv;
pub mod run;
pub mod verify;

pub use config::{load_configs, parse_configs, ExperimentConfig, Method, Metric, SweepVariable};
pub use csv::{ResultRow, HEADER};
pub use run::{analytic_transform, execute, run, Overrides, RunReport};
pub use verify::{verify, PropertyResult, Suite, VerifyOptions};
