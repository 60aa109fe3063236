//! Scenario runner for `fracstep-core`: TOML scenarios, CSV and JSON
//! artifacts, and the model and diagnostic registry.

pub mod config;
pub mod error;
pub mod formats;
pub mod registry;
pub mod runner;

pub use error::CliError;
