//! Configuration, presets, orchestration and output files.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;
pub mod validate;

pub use config::{ArraySpec, Discretization, ExperimentConfig, Measurement, ScattererSpec};
pub use presets::{preset, PRESET_NAMES};
pub use run::{execute, run, verify_manifest, RunManifest, RunOutput};
pub use validate::{validate, ValidationReport};
