//! Library side of the `segstat` command-line tool: CSV ingestion,
//! report types and the subcommand implementations.

pub mod commands;
pub mod csv_io;
pub mod error;
pub mod report;

pub use error::{CliError, CliResult};
