//! Command-line harness around `qecm-core`: experiment configuration,
//! deterministic JSON and CSV output, and the acceptance checks.
//!
//! ```text
//! qecm game --scheme ce --lambda 2 --attack breidbart --mode exact
//! qecm curve --min 1 --max 10
//! qecm moe --lambda 1 --restarts 10
//! qecm verify --fast
//! ```

pub mod acceptance;
mod cli;
pub mod config;
pub mod experiments;

pub use cli::{exit_code, run, EXIT_CAPACITY, EXIT_CONFIG, EXIT_FAILED, EXIT_OK};
