//! File formats and the batch runner behind the `dop-walk` command.

pub mod config;
pub mod runner;
pub mod schema;

pub use config::{Format, OperatorKind, Overrides, RunPlan, WalkConfig};
pub use runner::{run, CliError, InvariantReport, RunOutcome};
