//! Library side of the `rescycle` command: configuration loading, the verb
//! implementations and the SVG writer.

pub mod commands;
pub mod config;
pub mod error;
pub mod svg;

pub use commands::Output;
pub use config::{Format, RunConfig};
pub use error::{CliError, Result};
