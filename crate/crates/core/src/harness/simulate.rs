//! Single-engagement replay and fixed-policy evaluation.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use super::scripted::{ScriptedKind, ScriptedPilot};
use super::HarnessError;
use crate::curriculum::{self, CurriculumKind, MAX_DISTANCE, MIN_DISTANCE};
use crate::engagement::{Engagement, EngagementConfig, Outcome, Pilot, Tally, TrajectoryRecord};
use crate::flightdyn::AircraftState;
use crate::geometry::wrap_angle;
use crate::ppo::{GreedyPilot, Policy};
use crate::rng::{substream, Stream};
use crate::side::Side;

/// Who flies the blue aircraft. The agent always flies red.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Opponent {
    SelfPlay,
    Scripted(ScriptedKind),
}

impl std::str::FromStr for Opponent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "self-play" {
            Ok(Opponent::SelfPlay)
        } else {
            s.parse().map(Opponent::Scripted)
        }
    }
}

impl std::fmt::Display for Opponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Opponent::SelfPlay => f.write_str("self-play"),
            Opponent::Scripted(k) => write!(f, "{k}"),
        }
    }
}

fn blue_pilot<'a>(opponent: Opponent, policy: &'a Policy, seed: u64) -> Box<dyn Pilot<f64> + 'a> {
    match opponent {
        Opponent::SelfPlay => Box::new(GreedyPilot { policy }),
        Opponent::Scripted(k) => Box::new(ScriptedPilot::new(k, seed)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulateOptions {
    /// Bearing of the opponent from the agent's nose, radians.
    pub azimuth: f64,
    pub distance: f64,
    /// Bearing of the agent from the opponent's nose (0: opponent points at the agent).
    pub opponent_azimuth: f64,
    pub altitude: f64,
    pub speed: f64,
    pub opponent: ScriptedKind,
    pub seed: u64,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self {
            azimuth: 0.0,
            distance: 60_000.0,
            opponent_azimuth: 0.0,
            altitude: 6_000.0,
            speed: 300.0,
            opponent: ScriptedKind::StraightLine,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub outcome: Outcome,
    pub steps: usize,
    pub trajectory: Vec<TrajectoryRecord>,
}

/// One deterministic engagement of the policy (red, mean actions) against a
/// scripted opponent.
pub fn simulate(
    policy: &Policy,
    config: &EngagementConfig<f64>,
    options: &SimulateOptions,
) -> Result<SimulationResult, HarnessError> {
    let pi = std::f64::consts::PI;
    if !(-pi..=pi).contains(&options.azimuth) || !(-pi..=pi).contains(&options.opponent_azimuth) {
        return Err(HarnessError::Config(format!("azimuth must lie in [-pi, pi], got {}", options.azimuth)));
    }
    if !(MIN_DISTANCE..=MAX_DISTANCE).contains(&options.distance) {
        return Err(HarnessError::Config(format!(
            "distance must lie in [{MIN_DISTANCE}, {MAX_DISTANCE}], got {}",
            options.distance
        )));
    }
    let red = AircraftState {
        x: 0.0,
        y: 0.0,
        z: options.altitude,
        v: options.speed,
        gamma: 0.0,
        psi: wrap_angle(-options.azimuth),
    };
    let blue = AircraftState {
        x: options.distance,
        psi: wrap_angle(pi - options.opponent_azimuth),
        ..red
    };
    let mut eng = Engagement::new(*config, red, blue)?;
    let mut agent = GreedyPilot { policy };
    let mut opponent = ScriptedPilot::new(options.opponent, options.seed);
    let mut trajectory = Vec::new();
    let outcome = eng.run(&mut agent, &mut opponent, |e| trajectory.extend(e.snapshot()))?;
    Ok(SimulationResult { outcome, steps: eng.steps(), trajectory })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluateOptions {
    pub kind: CurriculumKind,
    pub stage: usize,
    pub episodes: usize,
    pub seed: u64,
    pub opponent: Opponent,
}

/// Runs `episodes` deterministic engagements with initial conditions drawn
/// from the given stage. The tally is from the agent's (red) perspective.
pub fn evaluate(
    policy: &Policy,
    config: &EngagementConfig<f64>,
    options: &EvaluateOptions,
) -> Result<Tally, HarnessError> {
    let stage = curriculum::stage(options.kind, options.stage)?;
    let env = config.with_stage(&stage);
    env.validate()?;
    let outcomes: Vec<Outcome> = (0..options.episodes)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(options.seed, Stream::Evaluation, &[k as u64]);
            let mut eng = Engagement::sampled(env, &mut rng)?;
            let mut red = GreedyPilot { policy };
            let mut blue = blue_pilot(options.opponent, policy, options.seed.wrapping_add(k as u64));
            eng.run(&mut red, blue.as_mut(), |_| {})
        })
        .collect::<Result<_, _>>()?;
    let mut tally = Tally::default();
    for o in &outcomes {
        tally.record(o, Side::Red);
    }
    Ok(tally)
}

/// Writes one JSON object per line.
pub fn write_trajectory(path: &Path, records: &[TrajectoryRecord]) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).expect("trajectory records serialize");
        writeln!(w, "{line}").map_err(|e| HarnessError::io(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRecord>, HarnessError> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line).map_err(|e| HarnessError::Parse {
            path: path.to_path_buf(),
            message: format!("line {}: {e}", i + 1),
        })?;
        out.push(r);
    }
    Ok(out)
}
