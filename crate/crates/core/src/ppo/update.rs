//! Clipped-surrogate policy update with a squared-error critic.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::buffer::RolloutBuffer;
use super::policy::{entropy, log_prob, sigmoid, Policy, ACTOR_OUTPUTS, CONTROL_DIM};
use super::PpoError;
use crate::engagement::OBS_DIM;
use crate::nn::{clip_global_norm, Adam, AdamConfig, Mlp};

/// Samples per gradient work unit. Fixed so results do not depend on the
/// number of threads.
const GRAD_CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpoConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub clip_ratio: f32,
    pub entropy_coefficient: f32,
    pub max_grad_norm: f32,
    pub actor_learning_rate: f64,
    pub critic_learning_rate: f64,
    pub normalize_advantages: bool,
    pub gamma: f32,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            batch_size: 1024,
            epochs: 8,
            clip_ratio: 0.2,
            entropy_coefficient: 0.01,
            max_grad_norm: 0.5,
            actor_learning_rate: 0.002,
            critic_learning_rate: 0.001,
            normalize_advantages: true,
            gamma: 1.0,
        }
    }
}

/// `min(r·A, clip(r, 1−ε, 1+ε)·A)` and its derivative with respect to `r`.
pub fn clipped_surrogate(ratio: f32, advantage: f32, clip: f32) -> (f32, f32) {
    let unclipped = ratio * advantage;
    let clipped = ratio.clamp(1.0 - clip, 1.0 + clip) * advantage;
    if unclipped <= clipped {
        (unclipped, advantage)
    } else {
        (clipped, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UpdateStats {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
    pub minibatches: usize,
}

impl UpdateStats {
    pub fn is_finite(&self) -> bool {
        self.policy_loss.is_finite() && self.value_loss.is_finite() && self.entropy.is_finite()
    }
}

/// Policy plus its two optimisers.
#[derive(Debug, Clone)]
pub struct Learner {
    pub policy: Policy,
    actor_opt: Adam<f32>,
    critic_opt: Adam<f32>,
}

struct ChunkGrad {
    actor: Mlp<f32>,
    critic: Mlp<f32>,
    log_spread: [f32; CONTROL_DIM],
    policy_loss: f64,
    value_loss: f64,
    entropy: f64,
    kl: f64,
    clipped: usize,
}

impl Learner {
    pub fn new(policy: Policy, config: &PpoConfig) -> Self {
        Self {
            policy,
            actor_opt: Adam::new(AdamConfig::with_lr(config.actor_learning_rate)),
            critic_opt: Adam::new(AdamConfig::with_lr(config.critic_learning_rate)),
        }
    }

    /// Runs `epochs` passes of shuffled minibatches over `buffer`, which must
    /// already hold returns and advantages.
    pub fn update<R: Rng + ?Sized>(
        &mut self,
        buffer: &RolloutBuffer,
        config: &PpoConfig,
        rng: &mut R,
    ) -> Result<UpdateStats, PpoError> {
        let n = buffer.len();
        if n == 0 || buffer.advantages.len() != n || buffer.returns.len() != n {
            return Err(PpoError::MissingAdvantages);
        }
        let mut order: Vec<usize> = (0..n).collect();
        let mut totals = UpdateStats::default();
        let mut samples = 0usize;
        for epoch in 0..config.epochs {
            order.shuffle(rng);
            for (mb, batch) in order.chunks(config.batch_size.max(1)).enumerate() {
                let g = self.minibatch_gradients(buffer, batch, config);
                let m = batch.len() as f64;
                if !(g.policy_loss.is_finite() && g.value_loss.is_finite()) {
                    return Err(PpoError::NonFiniteLoss {
                        epoch,
                        minibatch: mb,
                        policy_loss: g.policy_loss,
                        value_loss: g.value_loss,
                    });
                }
                self.apply(g.actor, g.critic, g.log_spread, config)?;
                totals.policy_loss += g.policy_loss * m;
                totals.value_loss += g.value_loss * m;
                totals.entropy += g.entropy * m;
                totals.approx_kl += g.kl * m;
                totals.clip_fraction += g.clipped as f64;
                totals.minibatches += 1;
                samples += batch.len();
            }
        }
        let s = samples as f64;
        totals.policy_loss /= s;
        totals.value_loss /= s;
        totals.entropy /= s;
        totals.approx_kl /= s;
        totals.clip_fraction /= s;
        Ok(totals)
    }

    fn apply(
        &mut self,
        mut actor: Mlp<f32>,
        mut critic: Mlp<f32>,
        mut log_spread: [f32; CONTROL_DIM],
        config: &PpoConfig,
    ) -> Result<(), PpoError> {
        {
            let mut grads = actor.param_slices_mut();
            grads.push(&mut log_spread);
            clip_global_norm(&mut grads, config.max_grad_norm);
        }
        let mut actor_grads = actor.param_slices();
        actor_grads.push(&log_spread);
        let params = &mut self.policy.params;
        let mut actor_params = params.actor.param_slices_mut();
        actor_params.push(&mut params.action_log_spread);
        self.actor_opt.step(&mut actor_params, &actor_grads)?;
        params.clamp_log_spread();

        clip_global_norm(&mut critic.param_slices_mut(), config.max_grad_norm);
        self.critic_opt.step(&mut params.critic.param_slices_mut(), &critic.param_slices())?;
        Ok(())
    }

    /// Mean losses over the minibatch and their gradients.
    fn minibatch_gradients(&self, buffer: &RolloutBuffer, batch: &[usize], config: &PpoConfig) -> ChunkGrad {
        let inv_n = 1.0 / batch.len() as f32;
        let chunks: Vec<ChunkGrad> =
            batch.par_chunks(GRAD_CHUNK).map(|chunk| self.chunk_gradients(buffer, chunk, inv_n, config)).collect();
        let mut iter = chunks.into_iter();
        let mut acc = iter.next().expect("non-empty minibatch");
        for c in iter {
            for (a, b) in acc.actor.param_slices_mut().into_iter().zip(c.actor.param_slices()) {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            }
            for (a, b) in acc.critic.param_slices_mut().into_iter().zip(c.critic.param_slices()) {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            }
            for k in 0..CONTROL_DIM {
                acc.log_spread[k] += c.log_spread[k];
            }
            acc.policy_loss += c.policy_loss;
            acc.value_loss += c.value_loss;
            acc.entropy += c.entropy;
            acc.kl += c.kl;
            acc.clipped += c.clipped;
        }
        acc
    }

    fn chunk_gradients(&self, buffer: &RolloutBuffer, idx: &[usize], inv_n: f32, config: &PpoConfig) -> ChunkGrad {
        let params = &self.policy.params;
        let mut inputs = Vec::with_capacity(idx.len() * OBS_DIM);
        for &i in idx {
            inputs.extend_from_slice(&buffer.transitions[i].observation);
        }
        let actor_tape = params.actor.forward_batch(&inputs, idx.len()).expect("fixed observation size");
        let critic_tape = params.critic.forward_batch(&inputs, idx.len()).expect("fixed observation size");
        let spread = &params.action_log_spread;
        let sigma_sq: Vec<f32> = spread.iter().map(|s| (2.0 * s).exp()).collect();
        let c = config.entropy_coefficient;

        let mut actor_out_grad = vec![0.0f32; idx.len() * ACTOR_OUTPUTS];
        let mut critic_out_grad = vec![0.0f32; idx.len()];
        let mut g = ChunkGrad {
            actor: params.actor.zeros_like(),
            critic: params.critic.zeros_like(),
            log_spread: [0.0; CONTROL_DIM],
            policy_loss: 0.0,
            value_loss: 0.0,
            entropy: 0.0,
            kl: 0.0,
            clipped: 0,
        };
        for (row, &i) in idx.iter().enumerate() {
            let t = &buffer.transitions[i];
            let out = &actor_tape.output()[row * ACTOR_OUTPUTS..(row + 1) * ACTOR_OUTPUTS];
            let logit = out[CONTROL_DIM];
            let lp = log_prob(out, spread, &t.raw_action, logit, t.fire, t.fire_available);
            let ratio = (lp - t.log_prob).exp();
            let adv = buffer.advantages[i];
            let (surrogate, d_ratio) = clipped_surrogate(ratio, adv, config.clip_ratio);
            let ent = entropy(spread, logit, t.fire_available);
            g.policy_loss += (-(surrogate + c * ent) * inv_n) as f64;
            g.entropy += (ent * inv_n) as f64;
            g.kl += ((t.log_prob - lp) * inv_n) as f64;
            if (ratio - 1.0).abs() > config.clip_ratio {
                g.clipped += 1;
            }

            let d_logp = -d_ratio * ratio * inv_n;
            let og = &mut actor_out_grad[row * ACTOR_OUTPUTS..(row + 1) * ACTOR_OUTPUTS];
            for k in 0..CONTROL_DIM {
                let diff = t.raw_action[k] - out[k];
                og[k] = d_logp * diff / sigma_sq[k];
                g.log_spread[k] += d_logp * (diff * diff / sigma_sq[k] - 1.0) - c * inv_n;
            }
            if t.fire_available {
                let p = sigmoid(logit);
                let fire = if t.fire { 1.0 } else { 0.0 };
                // dH/dl = −p(1−p)·l for the Bernoulli entropy.
                og[CONTROL_DIM] = d_logp * (fire - p) + c * inv_n * p * (1.0 - p) * logit;
            }

            let v = critic_tape.output()[row];
            let err = v - buffer.returns[i];
            g.value_loss += (0.5 * err * err * inv_n) as f64;
            critic_out_grad[row] = err * inv_n;
        }
        params.actor.backward(&actor_tape, &actor_out_grad, &mut g.actor).expect("shapes match");
        params.critic.backward(&critic_tape, &critic_out_grad, &mut g.critic).expect("shapes match");
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surrogate_at_unit_ratio_is_advantage() {
        assert_eq!(clipped_surrogate(1.0, 0.7, 0.2), (0.7, 0.7));
        assert_eq!(clipped_surrogate(1.0, -0.7, 0.2), (-0.7, -0.7));
    }

    #[test]
    fn surrogate_clips_large_ratio_with_positive_advantage() {
        let eps = 0.2;
        let (v, d) = clipped_surrogate(1.0 + 2.0 * eps, 1.5, eps);
        assert!((v - (1.0 + eps) * 1.5).abs() < 1e-6);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn surrogate_keeps_gradient_for_large_ratio_with_negative_advantage() {
        let (v, d) = clipped_surrogate(1.4, -1.0, 0.2);
        assert!((v + 1.4).abs() < 1e-6);
        assert_eq!(d, -1.0);
    }
}
