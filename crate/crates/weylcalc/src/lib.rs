//! Command-line front end, verification suites and file formats for
//! [`weylcalc_core`].
//!
//! The binary `weylcalc` is a thin clap wrapper around [`commands`]; every
//! command returns a [`CommandOutcome`] whose status maps to the process
//! exit code (0 ok, 1 mismatch, 2 error).

pub mod commands;
pub mod error;
pub mod formats;
pub mod outcome;
pub mod suites;

pub use error::CliError;
pub use outcome::{CommandOutcome, Status};
pub use suites::{Suite, SuiteParams, SuiteReport};
