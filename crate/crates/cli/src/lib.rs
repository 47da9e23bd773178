//! File formats, study specifications and plots for the `multigof`
//! command-line tool.

pub mod data;
pub mod error;
pub mod output;
pub mod plot;
pub mod spec;

pub use error::{CliError, Failure};
