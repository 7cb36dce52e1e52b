// Validation deliberately writes `!(x > 0.0)` so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Library surface of the `hyplyap` command-line driver: config parsing,
//! presets and the command implementations, kept callable for tests.

pub mod commands;
pub mod config;
pub mod table;

pub use commands::{cmd_check, cmd_run, cmd_sv, CliError};
pub use config::{apply_config, parse_config, preset, ConfigError, ModelKind, RunConfig};
pub use table::{cmd_table, table_eta, TableVariant};
