//! Scenario loading, fleet generation, experiment drivers and result files
//! for the `edgeplan` command-line tool.

pub mod error;
pub mod experiments;
pub mod report;
pub mod scenario;

pub use error::{CliError, Result};
