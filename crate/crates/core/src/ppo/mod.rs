//! Self-play proximal policy optimisation.

mod buffer;
mod collect;
mod policy;
mod train;
mod update;

pub use buffer::{normalize_in_place, RolloutBuffer, Transition};
pub use collect::{collect_cycle, evaluate_selfplay, play_selfplay_episode, CycleData, EpisodeRecord};
pub use policy::{
    actor_spec, control_from_raw, critic_spec, entropy, fire_available, log_prob, log_sigmoid, sigmoid, GreedyPilot,
    Policy, PolicyOutput, ACTOR_OUTPUTS, CONTROL_DIM, HIDDEN,
};
pub use train::{train, IterationStats, TrainConfig, TrainResult};
pub use update::{clipped_surrogate, Learner, PpoConfig, UpdateStats};

use thiserror::Error;

use crate::engagement::EngagementError;
use crate::nn::NnError;

#[derive(Debug, Error)]
pub enum PpoError {
    #[error("buffer has no returns/advantages")]
    MissingAdvantages,
    #[error("non-finite loss at epoch {epoch}, minibatch {minibatch}: policy {policy_loss}, value {value_loss}")]
    NonFiniteLoss { epoch: usize, minibatch: usize, policy_loss: f64, value_loss: f64 },
    #[error("return identity violated: {0}")]
    ReturnIdentity(String),
    #[error(transparent)]
    Network(#[from] NnError),
    #[error(transparent)]
    Engagement(#[from] EngagementError),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
}
