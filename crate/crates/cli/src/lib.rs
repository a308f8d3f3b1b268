//! Command-line front end: scenario parsing, dispatch and report output.

pub mod config;
pub mod run;

pub use config::{parse_config, parse_config_str, ConfigError, ScenarioConfig};
pub use run::{run, write_outputs, Command, RunReport};
