//! Configuration, orchestration and artifact output for the `beamwave`
//! command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod run;

pub use config::{load_config, parse_config, Command, ConfigError, Equation, RunConfig};
pub use run::{run, RunReport, EXIT_CONFIG, EXIT_MISMATCH, EXIT_OK, EXIT_SOLVER};
