//! Self-play rollouts: one shared policy flies both aircraft.

use rayon::prelude::*;

use super::buffer::{RolloutBuffer, Transition};
use super::policy::{Policy, PolicyOutput};
use crate::engagement::{Engagement, EngagementConfig, EngagementError, Outcome, Tally};
use crate::rng::{substream, Stream};
use crate::side::Side;

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub outcome: Outcome,
    pub steps: usize,
    /// Indexed by [`Side::index`].
    pub trajectories: [Vec<Transition>; 2],
}

/// Plays one self-play engagement. With `stochastic` the policy samples its
/// actions, otherwise it flies its mean action.
pub fn play_selfplay_episode(
    policy: &Policy,
    config: &EngagementConfig<f64>,
    seed: u64,
    path: &[u64],
    episode: usize,
    stochastic: bool,
) -> Result<EpisodeRecord, EngagementError> {
    let mut init_rng = substream(seed, Stream::Engagement, path);
    let mut action_rng = substream(seed, Stream::Action, path);
    let mut eng = Engagement::sampled(*config, &mut init_rng)?;
    let mut trajectories: [Vec<Transition>; 2] = [Vec::new(), Vec::new()];
    loop {
        let decisions: [(PolicyOutput, [f32; 12], bool); 2] = Side::BOTH.map(|side| {
            let obs = eng.observe(side).to_f32();
            let own = eng.fighter(side);
            let available =
                own.magazine.remaining > 0 && eng.config.in_radar_cone(&own.state, &eng.fighter(side.opponent()).state);
            let out = if stochastic {
                policy.sample(&obs, available, &mut action_rng)
            } else {
                policy.mean_action(&obs, available)
            };
            (out, obs, available)
        });
        let report = eng.advance(&decisions[0].0.action(), &decisions[1].0.action())?;
        let done = report.outcome.is_some();
        for side in Side::BOTH {
            let (out, obs, available) = decisions[side.index()];
            trajectories[side.index()].push(Transition {
                observation: obs,
                raw_action: out.raw,
                fire: out.fire,
                fire_available: available,
                log_prob: out.log_prob,
                value: out.value,
                reward: report.rewards[side.index()] as f32,
                done,
                side,
                episode,
            });
        }
        if let Some(outcome) = report.outcome {
            return Ok(EpisodeRecord { outcome, steps: eng.steps(), trajectories });
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CycleData {
    pub buffer: RolloutBuffer,
    /// From red's perspective.
    pub tally: Tally,
    pub outcomes: Vec<Outcome>,
}

/// Collects whole self-play episodes until each side has at least
/// `min_per_side` transitions. Episodes run `workers` at a time; episode `k`
/// always uses the random sub-streams at `path ++ [k]`.
pub fn collect_cycle(
    policy: &Policy,
    config: &EngagementConfig<f64>,
    min_per_side: usize,
    seed: u64,
    path: &[u64],
    workers: usize,
) -> Result<CycleData, EngagementError> {
    let workers = workers.max(1);
    let mut data = CycleData::default();
    let mut per_side = 0usize;
    let mut next_episode = 0usize;
    while per_side < min_per_side.max(1) {
        let ids: Vec<usize> = (next_episode..next_episode + workers).collect();
        next_episode += workers;
        let play = |&k: &usize| {
            let mut p = path.to_vec();
            p.push(k as u64);
            play_selfplay_episode(policy, config, seed, &p, k, true)
        };
        let wave: Vec<Result<EpisodeRecord, EngagementError>> =
            if workers == 1 { ids.iter().map(play).collect() } else { ids.par_iter().map(play).collect() };
        for rec in wave {
            let rec = rec?;
            per_side += rec.steps;
            data.tally.record(&rec.outcome, Side::Red);
            data.outcomes.push(rec.outcome);
            let [red, blue] = rec.trajectories;
            data.buffer.push_trajectory(red);
            data.buffer.push_trajectory(blue);
            if per_side >= min_per_side {
                break;
            }
        }
    }
    Ok(data)
}

/// Deterministic self-play evaluation: mean actions, initial conditions from
/// the evaluation stream.
pub fn evaluate_selfplay(
    policy: &Policy,
    config: &EngagementConfig<f64>,
    episodes: usize,
    seed: u64,
    path: &[u64],
) -> Result<Vec<Outcome>, EngagementError> {
    (0..episodes)
        .into_par_iter()
        .map(|k| {
            let mut p = vec![u64::MAX];
            p.extend_from_slice(path);
            p.push(k as u64);
            let mut init_rng = substream(seed, Stream::Evaluation, &p);
            let mut eng = Engagement::sampled(*config, &mut init_rng)?;
            let mut red = super::GreedyPilot { policy };
            let mut blue = super::GreedyPilot { policy };
            eng.run(&mut red, &mut blue, |_| {})
        })
        .collect()
}
