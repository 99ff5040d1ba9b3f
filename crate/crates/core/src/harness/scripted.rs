//! Hand-written opponents for replay and evaluation.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::engagement::{relative_geometry, Action, Pilot, PilotView};
use crate::flightdyn::{ControlInput, NZ_MAX};
use crate::rng::{substream, Rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScriptedKind {
    StraightLine,
    PurePursuit,
    RandomManeuver,
}

impl ScriptedKind {
    pub const ALL: [ScriptedKind; 3] = [ScriptedKind::StraightLine, ScriptedKind::PurePursuit, ScriptedKind::RandomManeuver];

    pub fn name(self) -> &'static str {
        match self {
            ScriptedKind::StraightLine => "straight-line",
            ScriptedKind::PurePursuit => "pure-pursuit",
            ScriptedKind::RandomManeuver => "random-maneuver",
        }
    }
}

impl fmt::Display for ScriptedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScriptedKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown scripted opponent {s:?} (expected straight-line, pure-pursuit or random-maneuver)"))
    }
}

/// Pure pursuit: turn the nose onto the line of sight, hold cruise speed and
/// launch once the target is inside the cone and this range.
const PURSUIT_LAUNCH_RANGE: f64 = 60_000.0;
const PURSUIT_GAIN: f64 = 4.0;
const CRUISE_SPEED: f64 = 330.0;
const SPEED_TIME_CONSTANT: f64 = 10.0;
/// Random maneuvers are re-drawn every this many decisions.
const MANEUVER_HOLD: usize = 25;
const FLOOR: f64 = 1500.0;

pub struct ScriptedPilot {
    kind: ScriptedKind,
    rng: Rng,
    step: usize,
    current: ControlInput<f64>,
}

impl ScriptedPilot {
    pub fn new(kind: ScriptedKind, seed: u64) -> Self {
        Self { kind, rng: substream(seed, Stream::Scripted, &[]), step: 0, current: ControlInput::level() }
    }

    pub fn kind(&self) -> ScriptedKind {
        self.kind
    }
}

fn hold_speed(view: &PilotView<'_, f64>) -> f64 {
    let s = &view.own.state;
    s.gamma.sin() + (CRUISE_SPEED - s.v) / (view.config.physics.g * SPEED_TIME_CONSTANT)
}

/// Load factor and bank that produce the requested lateral and vertical
/// accelerations (in g, vertical including gravity compensation).
fn steer(lateral: f64, vertical: f64) -> (f64, f64) {
    let nz = lateral.hypot(vertical).min(NZ_MAX);
    (nz, lateral.atan2(vertical))
}

fn pursuit(view: &PilotView<'_, f64>) -> Action<f64> {
    let own = &view.own.state;
    let opp = &view.opponent.state;
    let g = relative_geometry(own, opp);
    let lateral = PURSUIT_GAIN * g.bearing;
    let vertical = PURSUIT_GAIN * (g.elevation - own.gamma) + own.gamma.cos();
    let (nz, mu) = steer(lateral, vertical);
    let fire = view.own.magazine.remaining > 0
        && view.own.missile.is_none()
        && g.range <= PURSUIT_LAUNCH_RANGE
        && view.config.in_radar_cone(own, opp);
    Action { control: ControlInput::new(hold_speed(view), nz, mu).clamped(), fire }
}

impl Pilot<f64> for ScriptedPilot {
    fn decide(&mut self, view: &PilotView<'_, f64>) -> Action<f64> {
        let step = self.step;
        self.step += 1;
        match self.kind {
            ScriptedKind::StraightLine => Action::level(),
            ScriptedKind::PurePursuit => pursuit(view),
            ScriptedKind::RandomManeuver => {
                let s = &view.own.state;
                if s.z < FLOOR {
                    let (nz, mu) = steer(0.0, 3.0);
                    return Action { control: ControlInput::new(hold_speed(view), nz, mu), fire: false };
                }
                if step.is_multiple_of(MANEUVER_HOLD) {
                    let lateral = self.rng.random_range(-3.0..=3.0);
                    let vertical = s.gamma.cos() + self.rng.random_range(-1.0..=1.0);
                    let (nz, mu) = steer(lateral, vertical);
                    self.current = ControlInput::new(self.rng.random_range(-0.5..=1.0), nz, mu);
                }
                Action { control: self.current.clamped(), fire: false }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engagement::{Engagement, EngagementConfig};
    use crate::flightdyn::AircraftState;
    use crate::side::Side;

    fn eng(azimuth: f64) -> Engagement<f64> {
        let red = AircraftState { x: 0.0, y: 0.0, z: 6000.0, v: 300.0, gamma: 0.0, psi: -azimuth };
        let blue = AircraftState { x: 40_000.0, y: 0.0, z: 6000.0, v: 300.0, gamma: 0.0, psi: std::f64::consts::PI };
        Engagement::new(EngagementConfig::default(), red, blue).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for k in ScriptedKind::ALL {
            assert_eq!(k.name().parse::<ScriptedKind>().unwrap(), k);
        }
        assert!("loop".parse::<ScriptedKind>().is_err());
    }

    #[test]
    fn pursuit_turns_toward_target_and_fires_in_cone() {
        let e = eng(1.2);
        let mut p = ScriptedPilot::new(ScriptedKind::PurePursuit, 0);
        let a = e.consult(Side::Red, &mut p);
        // Target at bearing +1.2 rad, outside the cone: bank left.
        assert!(a.control.mu > 0.0);
        assert!(!a.fire);
        let head_on = eng(0.0);
        assert!(head_on.consult(Side::Red, &mut p).fire);
    }

    #[test]
    fn straight_line_never_fires() {
        let e = eng(0.0);
        let mut p = ScriptedPilot::new(ScriptedKind::StraightLine, 0);
        assert_eq!(e.consult(Side::Blue, &mut p), Action::level());
    }

    #[test]
    fn random_maneuver_is_seeded() {
        let run = |seed| {
            let e = eng(0.3);
            let mut p = ScriptedPilot::new(ScriptedKind::RandomManeuver, seed);
            (0..60).map(|_| e.consult(Side::Blue, &mut p)).collect::<Vec<_>>()
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }
}
