//! Stochastic policy over the engagement action space.
//!
//! The actor's four outputs are the means of three independent Gaussians
//! (one per continuous control, in a normalised [−1, 1] space) and the logit
//! of a Bernoulli fire decision. The spread of each Gaussian is a learned,
//! state-independent log standard deviation.


use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::engagement::{Action, Pilot, PilotView, OBS_DIM};
use crate::flightdyn::{ControlInput, NX_MAX, NX_MIN, NZ_MAX};
use crate::nn::{NetworkSpec, NnError, PolicyParameters};

pub const CONTROL_DIM: usize = 3;
pub const ACTOR_OUTPUTS: usize = CONTROL_DIM + 1;
pub const HIDDEN: usize = 256;

const HALF_LN_TWO_PI: f32 = 0.918_938_5;

pub fn actor_spec() -> NetworkSpec {
    NetworkSpec::new(&[OBS_DIM, HIDDEN, HIDDEN, ACTOR_OUTPUTS])
}

pub fn critic_spec() -> NetworkSpec {
    NetworkSpec::new(&[OBS_DIM, HIDDEN, HIDDEN, 1])
}

/// Maps a normalised control vector to load factors and bank angle.
/// Zero is straight and level flight; ±1 reaches the control limits.
pub fn control_from_raw(raw: &[f32; CONTROL_DIM]) -> ControlInput<f64> {
    let u = raw.map(|x| (x as f64).clamp(-1.0, 1.0));
    let nx = if u[0] >= 0.0 { u[0] * NX_MAX } else { -u[0] * NX_MIN };
    let nz = if u[1] >= 0.0 { 1.0 + u[1] * (NZ_MAX - 1.0) } else { 1.0 + u[1] };
    let mu = u[2] * std::f64::consts::PI;
    ControlInput::new(nx, nz, mu)
}

/// log σ(l) computed without overflow.
pub fn log_sigmoid(l: f32) -> f32 {
    if l >= 0.0 {
        -(-l).exp().ln_1p()
    } else {
        l - l.exp().ln_1p()
    }
}

pub fn sigmoid(l: f32) -> f32 {
    if l >= 0.0 {
        1.0 / (1.0 + (-l).exp())
    } else {
        let e = l.exp();
        e / (1.0 + e)
    }
}

/// Log-probability of `raw`/`fire` under the given distribution parameters.
/// The fire term only counts when firing was possible.
pub fn log_prob(
    means: &[f32],
    log_spread: &[f32],
    raw: &[f32; CONTROL_DIM],
    fire_logit: f32,
    fire: bool,
    fire_available: bool,
) -> f32 {
    let mut lp = 0.0;
    for k in 0..CONTROL_DIM {
        let z = (raw[k] - means[k]) / log_spread[k].exp();
        lp += -0.5 * z * z - log_spread[k] - HALF_LN_TWO_PI;
    }
    if fire_available {
        lp += if fire { log_sigmoid(fire_logit) } else { log_sigmoid(-fire_logit) };
    }
    lp
}

/// Entropy of the action distribution.
pub fn entropy(log_spread: &[f32], fire_logit: f32, fire_available: bool) -> f32 {
    let gauss: f32 = log_spread.iter().map(|s| s + 0.5 + HALF_LN_TWO_PI).sum();
    if fire_available {
        let p = sigmoid(fire_logit);
        gauss - p * log_sigmoid(fire_logit) - (1.0 - p) * log_sigmoid(-fire_logit)
    } else {
        gauss
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyOutput {
    pub raw: [f32; CONTROL_DIM],
    pub fire: bool,
    pub log_prob: f32,
    pub value: f32,
}

impl PolicyOutput {
    pub fn action(&self) -> Action<f64> {
        Action { control: control_from_raw(&self.raw), fire: self.fire }
    }
}

/// Actor-critic parameters plus the action distribution they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub params: PolicyParameters<f32>,
}

impl Policy {
    pub fn init<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let params =
            PolicyParameters::init(&actor_spec(), &critic_spec(), CONTROL_DIM, rng).expect("static specs are valid");
        Self { params }
    }

    pub fn from_params(params: PolicyParameters<f32>) -> Result<Self, NnError> {
        let ok = params.actor.input_dim() == OBS_DIM
            && params.actor.output_dim() == ACTOR_OUTPUTS
            && params.critic.input_dim() == OBS_DIM
            && params.critic.output_dim() == 1
            && params.action_log_spread.len() == CONTROL_DIM;
        if !ok {
            return Err(NnError::Format(format!(
                "model shape actor {:?} critic {:?} does not fit the engagement",
                params.actor.spec().layer_sizes,
                params.critic.spec().layer_sizes
            )));
        }
        Ok(Self { params })
    }

    pub fn actor_outputs(&self, obs: &[f32; OBS_DIM]) -> [f32; ACTOR_OUTPUTS] {
        let out = self.params.actor.forward(obs).expect("observation dimension is fixed");
        [out[0], out[1], out[2], out[3]]
    }

    pub fn value(&self, obs: &[f32; OBS_DIM]) -> f32 {
        self.params.critic.forward(obs).expect("observation dimension is fixed")[0]
    }

    /// Draws an action from the policy.
    pub fn sample<R: Rng + ?Sized>(&self, obs: &[f32; OBS_DIM], fire_available: bool, rng: &mut R) -> PolicyOutput {
        let out = self.actor_outputs(obs);
        let spread = &self.params.action_log_spread;
        let mut raw = [0.0f32; CONTROL_DIM];
        for k in 0..CONTROL_DIM {
            let n: f32 = StandardNormal.sample(rng);
            raw[k] = out[k] + spread[k].exp() * n;
        }
        let fire = fire_available && rng.random::<f32>() < sigmoid(out[3]);
        PolicyOutput {
            raw,
            fire,
            log_prob: log_prob(&out, spread, &raw, out[3], fire, fire_available),
            value: self.value(obs),
        }
    }

    /// Mean controls; fires when the fire probability exceeds one half.
    pub fn mean_action(&self, obs: &[f32; OBS_DIM], fire_available: bool) -> PolicyOutput {
        let out = self.actor_outputs(obs);
        let raw = [out[0], out[1], out[2]];
        let fire = fire_available && out[3] > 0.0;
        PolicyOutput {
            raw,
            fire,
            log_prob: log_prob(&out, &self.params.action_log_spread, &raw, out[3], fire, fire_available),
            value: self.value(obs),
        }
    }

    /// Probability of firing when firing is possible.
    pub fn fire_probability(&self, obs: &[f32; OBS_DIM]) -> f32 {
        sigmoid(self.actor_outputs(obs)[3])
    }
}

/// Whether `side` could launch right now.
pub fn fire_available(view: &PilotView<'_, f64>) -> bool {
    view.own.magazine.remaining > 0 && view.config.in_radar_cone(&view.own.state, &view.opponent.state)
}

/// Flies a side with the policy's mean action.
pub struct GreedyPilot<'a> {
    pub policy: &'a Policy,
}

impl Pilot<f64> for GreedyPilot<'_> {
    fn decide(&mut self, view: &PilotView<'_, f64>) -> Action<f64> {
        self.policy.mean_action(&view.observation.to_f32(), fire_available(view)).action()
    }
}
