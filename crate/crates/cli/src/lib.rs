//! Command-line front end for `flowbox-core`: field sources, chart and
//! report documents, and the subcommand implementations behind the
//! `flowbox` binary.

pub mod commands;
pub mod document;
pub mod error;
pub mod source;
pub mod table;

pub use error::CliError;

pub const TOOL: &str = "flowbox";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
