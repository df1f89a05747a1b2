//! Experiment orchestration for `rgg-envelope`: JSON configs, a content-keyed
//! graph cache, and the `build | solve | simulate | study | coverage` stages.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::Context;
pub use error::{CliError, Result};
