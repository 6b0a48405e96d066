//! Command line front end: CSV in, JSON artifacts (and optional SVG charts) out.

pub mod args;
pub mod artifact;
pub mod commands;
pub mod error;
pub mod ingest;
pub mod plot;
pub mod svg;

pub use args::Cli;
pub use commands::run;
pub use error::{CliError, CliResult};
