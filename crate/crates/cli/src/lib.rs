//! Batch front end: configuration files in, CSV and JSON artifacts out.

pub mod config;
pub mod experiment;
pub mod output;

pub use config::{parse_config, parse_config_with, Channel, ConfigError, ExperimentConfig, InitialDatum, Preset};
pub use experiment::{run_experiment, Outcome, RunError, RunOptions};
