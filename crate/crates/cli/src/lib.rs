//! Configuration, suites and reports behind the `g2glue` binary.

pub mod config;
pub mod error;
pub mod report;
pub mod suites;

pub use config::RunConfig;
pub use error::CliError;
pub use report::{Report, Status};
pub use suites::{run, Suite};
