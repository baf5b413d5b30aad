//! Experiment harness: run configuration, multi-seed training, evaluation,
//! parameter tables, pruning, latency benchmarks and curve export.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod metrics;

pub use checkpoint::Checkpoint;
pub use config::RunConfig;
pub use error::{HarnessError, Result};
pub use metrics::MetricsRow;
