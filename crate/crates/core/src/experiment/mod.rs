//! Batch experiments over sampled orders, with reproducible reports.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{run, COMMANDS};
pub use config::{ExperimentConfig, PairMode, Seeds};
pub use report::RunReport;
