//! Experiment harness: reads a JSON configuration, runs one experiment kind
//! from the [`registry::Registry`] and writes CSV tables plus a manifest.
//!
//! ```no_run
//! use deloc_lab::config::{validate_config, LoadOptions};
//! use deloc_lab::run::run_experiment;
//!
//! let text = std::fs::read_to_string("survey.json").unwrap();
//! let cfg = validate_config(&text, &LoadOptions::default()).unwrap();
//! let result = run_experiment(&cfg, Some(4)).unwrap();
//! println!("{} rows", result.primary().rows.len());
//! ```

pub mod config;
pub mod error;
pub mod experiments;
pub mod registry;
pub mod run;
pub mod table;

pub use config::{validate_config, ExperimentConfig, LoadOptions};
pub use error::{ConfigError, LabError};
pub use registry::{Experiment, Plan, Registry};
pub use run::{run_experiment, write_outputs, RunResult};
