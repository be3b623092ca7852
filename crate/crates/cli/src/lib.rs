//! Experiment runner for the `z3ro` precoder library.
//!
//! Each experiment is driven by an [`ExperimentConfig`] and produces a CSV
//! table plus a JSON sidecar recording the resolved configuration.

pub mod config;
pub mod experiments;
pub mod io;
mod verify_suite;

pub use config::{validate, ChannelConfig, ConfigFile, Experiment, ExperimentConfig, FieldError};
pub use experiments::{run, run_with_threads, RunOutput};

/// Sidecar document for a finished run.
pub fn sidecar(cfg: &ExperimentConfig, out: &RunOutput) -> serde_json::Value {
    serde_json::json!({
        "experiment": cfg.experiment.name(),
        "config": cfg,
        "summary": out.summary,
        "passed": out.passed,
    })
}
