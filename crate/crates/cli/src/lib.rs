//! Front end for `subfrac`: argument parsing, CSV tables and the subcommands.

pub mod cli;
pub mod commands;
pub mod grid;
pub mod table;

pub use cli::Cli;
pub use commands::{exit_code, run, ValidationFailed};
pub use table::DensityTable;
