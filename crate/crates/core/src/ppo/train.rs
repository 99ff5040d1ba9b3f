//! Training driver: iterations of collect→update cycles with curriculum
//! transfer checks in between.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::collect::{collect_cycle, evaluate_selfplay};
use super::policy::Policy;
use super::update::{Learner, PpoConfig};
use super::PpoError;
use crate::curriculum::{CurriculumKind, CurriculumProgress, TransferGate};
use crate::engagement::{EngagementConfig, Tally};
use crate::rng::{substream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub ppo: PpoConfig,
    pub iterations: usize,
    pub cycles_per_iteration: usize,
    /// Episodes simulated concurrently during collection. Results depend on
    /// this value; 1 gives the reference single-worker run.
    pub workers: usize,
    pub gate: TransferGate,
    /// Assert the γ = 1 return identity on every collected buffer.
    pub check_return_identity: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            ppo: PpoConfig::default(),
            iterations: 40,
            cycles_per_iteration: 20,
            workers: 4,
            gate: TransferGate::default(),
            check_return_identity: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), PpoError> {
        let p = &self.ppo;
        let positive = [
            ("batch_size", p.batch_size),
            ("epochs", p.epochs),
            ("iterations", self.iterations),
            ("cycles_per_iteration", self.cycles_per_iteration),
            ("workers", self.workers),
            ("gate.eval_episodes", self.gate.eval_episodes),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(PpoError::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if !(p.clip_ratio > 0.0 && p.entropy_coefficient >= 0.0 && p.max_grad_norm > 0.0) {
            return Err(PpoError::InvalidConfig("clip_ratio and max_grad_norm must be positive".into()));
        }
        if !(self.gate.decisive_threshold > 0.0 && self.gate.decisive_threshold <= 1.0) {
            return Err(PpoError::InvalidConfig("gate.decisive_threshold must be in (0, 1]".into()));
        }
        if !(p.gamma > 0.0 && p.gamma <= 1.0) {
            return Err(PpoError::InvalidConfig("gamma must be in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    /// 1-based.
    pub iteration: usize,
    /// Stage trained on during this iteration.
    pub stage: usize,
    /// Collection episodes, from red's perspective.
    pub tally: Tally,
    pub transitions: usize,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    /// Decisive fraction of the transfer-gate evaluation, when one ran.
    pub eval_decisive_rate: Option<f64>,
    pub advanced: bool,
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub stats: Vec<IterationStats>,
    pub policy: Policy,
}

/// Trains one policy from scratch on curriculum `kind`.
///
/// `on_iteration` is called after every iteration with the stats and the
/// current policy; when `checkpoint_dir` is set a model file is written there
/// per iteration.
pub fn train(
    kind: CurriculumKind,
    config: &TrainConfig,
    engagement: &EngagementConfig<f64>,
    seed: u64,
    checkpoint_dir: Option<&Path>,
    mut on_iteration: impl FnMut(&IterationStats, &Policy),
) -> Result<TrainResult, PpoError> {
    config.validate()?;
    engagement.validate()?;
    let mut init_rng = substream(seed, Stream::Init, &[]);
    let mut learner = Learner::new(Policy::init(&mut init_rng), &config.ppo);
    let mut progress = CurriculumProgress::new(kind);
    let mut stats = Vec::with_capacity(config.iterations);

    for it in 0..config.iterations {
        let stage = progress.current();
        let env = engagement.with_stage(&stage);
        let mut tally = Tally::default();
        let mut transitions = 0;
        let (mut pl, mut vl, mut ent) = (0.0, 0.0, 0.0);
        for cycle in 0..config.cycles_per_iteration {
            let path = [it as u64, cycle as u64];
            let mut data =
                collect_cycle(&learner.policy, &env, config.ppo.batch_size, seed, &path, config.workers)?;
            data.buffer.compute_returns_and_advantages(config.ppo.gamma, config.ppo.normalize_advantages);
            if config.check_return_identity && config.ppo.gamma == 1.0 {
                data.buffer.verify_return_identity().map_err(PpoError::ReturnIdentity)?;
            }
            let mut shuffle_rng = substream(seed, Stream::Shuffle, &path);
            let u = learner.update(&data.buffer, &config.ppo, &mut shuffle_rng)?;
            if !learner.policy.params.is_finite() {
                return Err(PpoError::NonFiniteLoss {
                    epoch: config.ppo.epochs,
                    minibatch: 0,
                    policy_loss: u.policy_loss,
                    value_loss: u.value_loss,
                });
            }
            tally.merge(&data.tally);
            transitions += data.buffer.len();
            pl += u.policy_loss;
            vl += u.value_loss;
            ent += u.entropy;
        }
        let cycles = config.cycles_per_iteration as f64;

        let mut eval_decisive_rate = None;
        let mut advanced = false;
        if progress.index < kind.last_stage() {
            let results =
                evaluate_selfplay(&learner.policy, &env, config.gate.eval_episodes, seed, &[it as u64])?;
            let decisive = results.iter().filter(|o| o.is_decisive()).count();
            eval_decisive_rate = Some(decisive as f64 / results.len() as f64);
            advanced = progress.update(&config.gate, &results);
        }

        let row = IterationStats {
            iteration: it + 1,
            stage: stage.index,
            tally,
            transitions,
            policy_loss: pl / cycles,
            value_loss: vl / cycles,
            entropy: ent / cycles,
            eval_decisive_rate,
            advanced,
        };
        if let Some(dir) = checkpoint_dir {
            std::fs::create_dir_all(dir).map_err(crate::nn::NnError::from)?;
            learner.policy.params.save(&dir.join(format!("iter_{:03}.model", it + 1)))?;
        }
        on_iteration(&row, &learner.policy);
        stats.push(row);
    }
    Ok(TrainResult { stats, policy: learner.policy })
}
