//! Experiment orchestration, result files and single-engagement replay.

mod config;
mod experiment;
mod records;
mod scripted;
mod simulate;

pub use config::{ExperimentConfig, DEFAULT_CONFIG_TOML};
pub use experiment::{run_experiment, ExperimentReport, SeedFailure};
pub use records::{
    aggregate, read_aggregate_csv, read_iteration_csv, write_aggregate_csv, write_iteration_csv, AggregateRecord,
    IterationRecord,
};
pub use scripted::{ScriptedKind, ScriptedPilot};
pub use simulate::{
    evaluate, read_trajectory, simulate, write_trajectory, EvaluateOptions, Opponent, SimulateOptions,
    SimulationResult,
};

use std::path::PathBuf;

use thiserror::Error;

use crate::curriculum::CurriculumError;
use crate::engagement::EngagementError;
use crate::nn::NnError;
use crate::ppo::PpoError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("model {path}: {source}")]
    Model { path: PathBuf, source: NnError },
    #[error(transparent)]
    Curriculum(#[from] CurriculumError),
    #[error(transparent)]
    Engagement(#[from] EngagementError),
    #[error(transparent)]
    Training(#[from] PpoError),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }
}
