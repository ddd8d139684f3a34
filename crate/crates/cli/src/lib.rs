//! Configuration, experiment orchestration and waveform persistence for the
//! `isacjam` workbench.

pub mod config;
mod error;
pub mod experiment;
pub mod persist;

pub use config::{load_config, preset, preset_names, resolve, ExperimentKind, Overrides, ScenarioConfig};
pub use error::{WorkbenchError, WorkbenchResult};
