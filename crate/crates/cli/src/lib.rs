//! Scenario files and subcommands behind the `gkdv` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod exit;

pub use config::ScenarioConfig;
pub use exit::{CliError, ExitCode};
