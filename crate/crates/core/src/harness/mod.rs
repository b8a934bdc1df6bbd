//! Experiment configuration, runs and the command-line interface.

pub mod cli;
pub mod config;
pub mod experiment;

pub use config::{ExperimentConfig, PlannerKind};
pub use experiment::{run_experiment, Curve, RunRecord, StepStat};
