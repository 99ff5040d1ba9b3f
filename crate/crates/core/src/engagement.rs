//! Two-aircraft engagement state machine.
//!
//! Both aircraft carry one missile. Each decision interval the two sides
//! submit an [`Action`] (manoeuvre controls plus a fire request), the world
//! advances by `dt_decision` in physics substeps, missiles are adjudicated,
//! and the engagement may terminate. Rewards are sparse: +1/−1 to the
//! winner/loser on the terminating step, 0 otherwise.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curriculum::CurriculumStage;
use crate::flightdyn::{self, AircraftState, ControlInput, PhysicsConstants};
use crate::geometry::{angle_between, wrap_angle, Vec3};
use crate::missile::{self, GuidancePhase, Magazine, MissileConfig, MissileState, MissileStatus};
use crate::scalar::Scalar;
use crate::side::Side;

pub const OBS_DIM: usize = 12;

/// Normalisation scales for the observation vector.
const SPEED_MID: f64 = 325.0;
const SPEED_HALF_SPAN: f64 = 75.0;
const ALTITUDE_MID: f64 = 6500.0;
const RANGE_RATE_SCALE: f64 = 1000.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngagementError {
    #[error("engagement already terminated: {0:?}")]
    Terminated(Outcome),
    #[error("invalid engagement configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar + serde::de::DeserializeOwned"))]
pub struct EngagementConfig<T> {
    pub max_sim_time: T,
    pub azimuth_range: (T, T),
    pub distance_range: (T, T),
    pub altitude_range: (T, T),
    pub speed_range: (T, T),
    pub radar_azimuth_limit: T,
    pub radar_range: T,
    pub physics: PhysicsConstants<T>,
    pub missile: MissileConfig<T>,
}

impl<T: Scalar> Default for EngagementConfig<T> {
    fn default() -> Self {
        Self {
            max_sim_time: T::lit(200.0),
            azimuth_range: (-T::PI(), T::PI()),
            distance_range: (T::lit(50_000.0), T::lit(150_000.0)),
            altitude_range: (T::lit(3000.0), T::lit(10_000.0)),
            speed_range: (T::lit(flightdyn::MIN_SPEED), T::lit(flightdyn::MAX_SPEED)),
            radar_azimuth_limit: T::FRAC_PI_3(),
            radar_range: T::lit(80_000.0),
            physics: PhysicsConstants::default(),
            missile: MissileConfig::default(),
        }
    }
}

impl<T: Scalar> EngagementConfig<T> {
    /// Copies of `self` sampling initial conditions from `stage`.
    pub fn with_stage(mut self, stage: &CurriculumStage) -> Self {
        let hw = T::lit(stage.azimuth_half_width);
        self.azimuth_range = (-hw, hw);
        self.distance_range = (T::lit(stage.distance_interval.0), T::lit(stage.distance_interval.1));
        self
    }

    pub fn validate(&self) -> Result<(), EngagementError> {
        let bad = |m: &str| Err(EngagementError::InvalidConfig(m.to_string()));
        if !(self.max_sim_time > T::zero()) {
            return bad("max_sim_time must be positive");
        }
        for (name, (lo, hi)) in [
            ("azimuth_range", self.azimuth_range),
            ("distance_range", self.distance_range),
            ("altitude_range", self.altitude_range),
            ("speed_range", self.speed_range),
        ] {
            if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
                return bad(&format!("{name} must be a non-empty interval"));
            }
        }
        if self.azimuth_range.0 < -T::PI() || self.azimuth_range.1 > T::PI() {
            return bad("azimuth_range must lie within [-pi, pi]");
        }
        if self.altitude_range.0 <= T::zero() {
            return bad("altitude_range must be above ground");
        }
        if self.speed_range.0 < T::lit(flightdyn::MIN_SPEED) || self.speed_range.1 > T::lit(flightdyn::MAX_SPEED) {
            return bad("speed_range must lie within the airframe speed limits");
        }
        if !(self.radar_azimuth_limit > T::zero() && self.radar_azimuth_limit <= T::PI()) {
            return bad("radar_azimuth_limit must be in (0, pi]");
        }
        if !(self.radar_range > T::zero()) {
            return bad("radar_range must be positive");
        }
        self.physics
            .substeps()
            .map_err(|e| EngagementError::InvalidConfig(e.to_string()))?;
        self.missile.validate().map_err(|e| EngagementError::InvalidConfig(e.to_string()))
    }

    /// Upper bound on decision steps per engagement.
    pub fn max_steps(&self) -> usize {
        (self.max_sim_time / self.physics.dt_decision).as_f64().ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Hit,
    BothMissed,
    Timeout,
    GroundContact,
}

/// Final result of an engagement. A mutual kill in one decision step is a
/// draw carrying the reason of the kill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    RedWins(Termination),
    BlueWins(Termination),
    Draw(Termination),
}

impl Outcome {
    pub fn winner(&self) -> Option<Side> {
        match self {
            Outcome::RedWins(_) => Some(Side::Red),
            Outcome::BlueWins(_) => Some(Side::Blue),
            Outcome::Draw(_) => None,
        }
    }

    pub fn termination(&self) -> Termination {
        match *self {
            Outcome::RedWins(t) | Outcome::BlueWins(t) | Outcome::Draw(t) => t,
        }
    }

    pub fn is_decisive(&self) -> bool {
        self.winner().is_some()
    }

    pub fn reward_for(&self, side: Side) -> i8 {
        match self.winner() {
            Some(w) if w == side => 1,
            Some(_) => -1,
            None => 0,
        }
    }

    /// The same result with the two sides' labels exchanged.
    pub fn swapped(&self) -> Outcome {
        match *self {
            Outcome::RedWins(t) => Outcome::BlueWins(t),
            Outcome::BlueWins(t) => Outcome::RedWins(t),
            d @ Outcome::Draw(_) => d,
        }
    }
}

/// Win/loss/draw counts from one side's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tally {
    pub wins: u64,
    pub losses: u64,
    pub draws: u64,
}

impl Tally {
    pub fn record(&mut self, outcome: &Outcome, perspective: Side) {
        match outcome.reward_for(perspective) {
            1 => self.wins += 1,
            -1 => self.losses += 1,
            _ => self.draws += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.wins + self.losses + self.draws
    }

    pub fn decisive_rate(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            (self.wins + self.losses) as f64 / self.total() as f64
        }
    }

    pub fn merge(&mut self, other: &Tally) {
        self.wins += other.wins;
        self.losses += other.losses;
        self.draws += other.draws;
    }
}

/// Normalised observation of one aircraft. Components:
///
/// | idx | meaning |
/// |-----|---------|
/// | 0 | own speed |
/// | 1 | own altitude |
/// | 2 | own flight-path angle |
/// | 3 | opponent bearing (horizontal, signed) |
/// | 4 | opponent elevation |
/// | 5 | opponent range |
/// | 6 | range rate |
/// | 7 | opponent aspect angle |
/// | 8 | own missile remaining |
/// | 9 | own missile in flight |
/// | 10 | own missile seeker active |
/// | 11 | incoming missile seeker detected |
///
/// Components 3–7 are zero when the opponent is outside the radar cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation<T>(pub [T; OBS_DIM]);

impl<T: Scalar> Observation<T> {
    pub fn to_f32(&self) -> [f32; OBS_DIM] {
        self.0.map(|c| c.as_f32())
    }

    pub fn opponent_visible(&self) -> bool {
        self.0[3..8].iter().any(|c| *c != T::zero())
    }
}

/// One aircraft plus its weapon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fighter<T> {
    pub state: AircraftState<T>,
    pub magazine: Magazine,
    pub missile: Option<MissileState<T>>,
    pub hit: bool,
    pub ground_contact: bool,
}

impl<T: Scalar> Fighter<T> {
    pub fn new(state: AircraftState<T>) -> Self {
        Self { state, magazine: Magazine::default(), missile: None, hit: false, ground_contact: false }
    }

    pub fn is_defeated(&self) -> bool {
        self.hit || self.ground_contact
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Action<T> {
    pub control: ControlInput<T>,
    pub fire: bool,
}

impl<T: Scalar> Action<T> {
    pub fn level() -> Self {
        Self { control: ControlInput::level(), fire: false }
    }
}

/// Relative geometry of the opponent as seen from `own`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeGeometry<T> {
    pub range: T,
    /// Horizontal bearing from the nose, (−π, π], positive to the left.
    pub bearing: T,
    /// Elevation of the line of sight above the horizontal.
    pub elevation: T,
    /// 3-D angle between the nose and the line of sight.
    pub off_boresight: T,
    /// Positive when opening.
    pub range_rate: T,
    /// Angle between the opponent's velocity and the line of sight back to `own`.
    pub aspect: T,
}

pub fn relative_geometry<T: Scalar>(own: &AircraftState<T>, opponent: &AircraftState<T>) -> RelativeGeometry<T> {
    let los = opponent.position() - own.position();
    let range = los.norm();
    let rel_vel = opponent.velocity() - own.velocity();
    let range_rate = if range > T::zero() { los.dot(rel_vel) / range } else { T::zero() };
    RelativeGeometry {
        range,
        bearing: wrap_angle(los.heading() - own.psi),
        elevation: los.elevation(),
        off_boresight: angle_between(own.nose(), los),
        range_rate,
        aspect: angle_between(opponent.velocity(), -los),
    }
}

impl<T: Scalar> EngagementConfig<T> {
    pub fn in_radar_cone(&self, own: &AircraftState<T>, opponent: &AircraftState<T>) -> bool {
        let g = relative_geometry(own, opponent);
        g.off_boresight <= self.radar_azimuth_limit && g.range <= self.radar_range
    }
}

fn unit_clamp<T: Scalar>(x: T) -> T {
    x.max(-T::one()).min(T::one())
}

fn flag<T: Scalar>(b: bool) -> T {
    if b {
        T::one()
    } else {
        T::zero()
    }
}

pub fn build_observation<T: Scalar>(
    own: &Fighter<T>,
    opponent: &Fighter<T>,
    config: &EngagementConfig<T>,
) -> Observation<T> {
    let s = &own.state;
    let mut o = [T::zero(); OBS_DIM];
    o[0] = unit_clamp((s.v - T::lit(SPEED_MID)) / T::lit(SPEED_HALF_SPAN));
    o[1] = unit_clamp((s.z - T::lit(ALTITUDE_MID)) / T::lit(ALTITUDE_MID));
    o[2] = unit_clamp(s.gamma / T::lit(flightdyn::MAX_GAMMA));
    let g = relative_geometry(s, &opponent.state);
    if g.off_boresight <= config.radar_azimuth_limit && g.range <= config.radar_range {
        o[3] = unit_clamp(g.bearing / T::PI());
        o[4] = unit_clamp(g.elevation / T::FRAC_PI_2());
        o[5] = unit_clamp(g.range / config.radar_range);
        o[6] = unit_clamp(g.range_rate / T::lit(RANGE_RATE_SCALE));
        o[7] = unit_clamp(g.aspect / T::PI());
    }
    let own_missile = own.missile.filter(|m| m.is_in_flight());
    o[8] = flag(own.magazine.remaining > 0);
    o[9] = flag(own_missile.is_some());
    o[10] = flag(own_missile.is_some_and(|m| m.phase == GuidancePhase::Terminal));
    let incoming = opponent.missile.filter(|m| m.is_in_flight());
    o[11] = flag(incoming.is_some_and(|m| m.phase == GuidancePhase::Terminal));
    Observation(o)
}

fn uniform<T: Scalar, R: Rng + ?Sized>(rng: &mut R, (lo, hi): (T, T)) -> T {
    let u: f64 = rng.random();
    lo + (hi - lo) * T::lit(u)
}

/// Samples the initial geometry. Red starts at the origin, blue at the
/// sampled separation along +x; each side's heading puts the other at its
/// own independently sampled bearing.
pub fn sample_initial<T: Scalar, R: Rng + ?Sized>(
    config: &EngagementConfig<T>,
    rng: &mut R,
) -> (AircraftState<T>, AircraftState<T>) {
    let distance = uniform(rng, config.distance_range);
    let bearing_red: T = uniform(rng, config.azimuth_range);
    let bearing_blue: T = uniform(rng, config.azimuth_range);
    let alt_red = uniform(rng, config.altitude_range);
    let alt_blue = uniform(rng, config.altitude_range);
    let v_red = uniform(rng, config.speed_range);
    let v_blue = uniform(rng, config.speed_range);
    let red = AircraftState {
        x: T::zero(),
        y: T::zero(),
        z: alt_red,
        v: v_red,
        gamma: T::zero(),
        psi: wrap_angle(-bearing_red),
    };
    let blue = AircraftState {
        x: distance,
        y: T::zero(),
        z: alt_blue,
        v: v_blue,
        gamma: T::zero(),
        psi: wrap_angle(T::PI() - bearing_blue),
    };
    (red, blue)
}

/// Result of one decision step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// Indexed by [`Side::index`].
    pub rewards: [i8; 2],
    pub outcome: Option<Outcome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Aircraft,
    Missile,
}

/// One line of a trajectory export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub id: String,
    pub kind: EntityKind,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub v: f64,
    pub gamma: f64,
    pub psi: f64,
    pub phase: Option<GuidancePhase>,
    pub status: Option<MissileStatus>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Engagement<T> {
    pub config: EngagementConfig<T>,
    /// Simulation time at step zero.
    pub start_time: T,
    steps: usize,
    fighters: [Fighter<T>; 2],
    outcome: Option<Outcome>,
    substeps: usize,
}

impl<T: Scalar> Engagement<T> {
    pub fn new(
        config: EngagementConfig<T>,
        red: AircraftState<T>,
        blue: AircraftState<T>,
    ) -> Result<Self, EngagementError> {
        config.validate()?;
        let substeps = config.physics.substeps().map_err(|e| EngagementError::InvalidConfig(e.to_string()))?;
        Ok(Self {
            config,
            start_time: T::zero(),
            steps: 0,
            fighters: [Fighter::new(red), Fighter::new(blue)],
            outcome: None,
            substeps,
        })
    }

    pub fn sampled<R: Rng + ?Sized>(config: EngagementConfig<T>, rng: &mut R) -> Result<Self, EngagementError> {
        let (red, blue) = sample_initial(&config, rng);
        Self::new(config, red, blue)
    }

    pub fn time(&self) -> T {
        self.start_time + T::from_usize(self.steps).expect("step count fits") * self.config.physics.dt_decision
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    pub fn is_terminated(&self) -> bool {
        self.outcome.is_some()
    }

    pub fn fighter(&self, side: Side) -> &Fighter<T> {
        &self.fighters[side.index()]
    }

    pub fn fighter_mut(&mut self, side: Side) -> &mut Fighter<T> {
        &mut self.fighters[side.index()]
    }

    pub fn observe(&self, side: Side) -> Observation<T> {
        build_observation(self.fighter(side), self.fighter(side.opponent()), &self.config)
    }

    pub fn advance(&mut self, red: &Action<T>, blue: &Action<T>) -> Result<StepReport, EngagementError> {
        if let Some(o) = self.outcome {
            return Err(EngagementError::Terminated(o));
        }
        let actions = [red, blue];
        let controls = actions.map(|a| a.control.clamped());

        // Fire decisions use the geometry at the start of the interval.
        let launch: [bool; 2] = Side::BOTH.map(|side| {
            let own = self.fighter(side);
            let opp = self.fighter(side.opponent());
            actions[side.index()].fire
                && own.magazine.remaining > 0
                && self.config.in_radar_cone(&own.state, &opp.state)
        });
        for side in Side::BOTH {
            if launch[side.index()] {
                let f = &mut self.fighters[side.index()];
                let m = f.magazine.launch(&f.state, side, side.opponent()).expect("magazine checked");
                f.missile = Some(m);
            }
        }

        let dt = self.config.physics.dt_physics;
        for _ in 0..self.substeps {
            let before = self.fighters.map(|f| f.state);
            let after = Side::BOTH.map(|s| flightdyn::step(&before[s.index()], &controls[s.index()], &self.config.physics));
            for side in Side::BOTH {
                let (i, j) = (side.index(), side.opponent().index());
                if let Some(m) = self.fighters[i].missile {
                    if m.is_in_flight() {
                        let next = missile::step_and_adjudicate(&m, &after[i], &before[j], &after[j], &self.config.missile, dt);
                        if next.status == MissileStatus::Hit {
                            self.fighters[j].hit = true;
                        }
                        self.fighters[i].missile = Some(next);
                    }
                }
            }
            for (f, s) in self.fighters.iter_mut().zip(after) {
                f.state = s;
                if s.z <= T::zero() {
                    f.ground_contact = true;
                }
            }
        }
        self.steps += 1;

        let outcome = self.judge();
        self.outcome = outcome;
        let rewards = match outcome {
            Some(o) => Side::BOTH.map(|s| o.reward_for(s)),
            None => [0, 0],
        };
        Ok(StepReport { rewards, outcome })
    }

    fn judge(&self) -> Option<Outcome> {
        let [red, blue] = &self.fighters;
        let reason = |hit: bool| if hit { Termination::Hit } else { Termination::GroundContact };
        match (red.is_defeated(), blue.is_defeated()) {
            (true, true) => return Some(Outcome::Draw(reason(red.hit || blue.hit))),
            (true, false) => return Some(Outcome::BlueWins(reason(red.hit))),
            (false, true) => return Some(Outcome::RedWins(reason(blue.hit))),
            (false, false) => {}
        }
        let missed = |f: &Fighter<T>| f.missile.is_some_and(|m| m.status == MissileStatus::Missed);
        if missed(red) && missed(blue) {
            return Some(Outcome::Draw(Termination::BothMissed));
        }
        if self.time() >= self.config.max_sim_time {
            return Some(Outcome::Draw(Termination::Timeout));
        }
        None
    }

    /// Trajectory records for every entity at the current time.
    pub fn snapshot(&self) -> Vec<TrajectoryRecord> {
        let t = self.time().as_f64();
        let mut out = Vec::with_capacity(4);
        for side in Side::BOTH {
            let f = self.fighter(side);
            let s = f.state;
            out.push(TrajectoryRecord {
                t,
                id: side.name().to_string(),
                kind: EntityKind::Aircraft,
                x: s.x.as_f64(),
                y: s.y.as_f64(),
                z: s.z.as_f64(),
                v: s.v.as_f64(),
                gamma: s.gamma.as_f64(),
                psi: s.psi.as_f64(),
                phase: None,
                status: None,
            });
        }
        for side in Side::BOTH {
            if let Some(m) = self.fighter(side).missile {
                let v = m.velocity;
                out.push(TrajectoryRecord {
                    t,
                    id: format!("{}_missile", side.name()),
                    kind: EntityKind::Missile,
                    x: m.position.x.as_f64(),
                    y: m.position.y.as_f64(),
                    z: m.position.z.as_f64(),
                    v: v.norm().as_f64(),
                    gamma: v.elevation().as_f64(),
                    psi: v.heading().as_f64(),
                    phase: Some(m.phase),
                    status: Some(m.status),
                });
            }
        }
        out
    }
}

/// Snapshot of what a pilot may base its decision on.
pub struct PilotView<'a, T> {
    pub side: Side,
    pub time: T,
    pub observation: &'a Observation<T>,
    pub own: &'a Fighter<T>,
    pub opponent: &'a Fighter<T>,
    pub config: &'a EngagementConfig<T>,
}

/// Anything that can fly one side of an engagement.
pub trait Pilot<T> {
    fn decide(&mut self, view: &PilotView<'_, T>) -> Action<T>;
}

impl<T, F> Pilot<T> for F
where
    F: FnMut(&PilotView<'_, T>) -> Action<T>,
{
    fn decide(&mut self, view: &PilotView<'_, T>) -> Action<T> {
        self(view)
    }
}

impl<T: Scalar> Engagement<T> {
    /// Queries one pilot for `side` at the current state.
    pub fn consult(&self, side: Side, pilot: &mut dyn Pilot<T>) -> Action<T> {
        let observation = self.observe(side);
        let view = PilotView {
            side,
            time: self.time(),
            observation: &observation,
            own: self.fighter(side),
            opponent: self.fighter(side.opponent()),
            config: &self.config,
        };
        pilot.decide(&view)
    }

    /// Runs to termination. `on_step` sees the engagement after every step
    /// (and once before the first).
    pub fn run(
        &mut self,
        red: &mut dyn Pilot<T>,
        blue: &mut dyn Pilot<T>,
        mut on_step: impl FnMut(&Engagement<T>),
    ) -> Result<Outcome, EngagementError> {
        on_step(self);
        loop {
            let a_red = self.consult(Side::Red, red);
            let a_blue = self.consult(Side::Blue, blue);
            let report = self.advance(&a_red, &a_blue)?;
            on_step(self);
            if let Some(o) = report.outcome {
                return Ok(o);
            }
        }
    }
}

/// Yaw rotation of a state about the world origin.
pub fn yaw_state<T: Scalar>(s: &AircraftState<T>, angle: T) -> AircraftState<T> {
    let p = s.position().yawed(angle);
    AircraftState { x: p.x, y: p.y, z: p.z, psi: wrap_angle(s.psi + angle), ..*s }
}

/// Reflection of a state across the vertical plane containing the x axis.
pub fn mirror_state<T: Scalar>(s: &AircraftState<T>) -> AircraftState<T> {
    AircraftState { y: -s.y, psi: wrap_angle(-s.psi), ..*s }
}

pub fn translate_state<T: Scalar>(s: &AircraftState<T>, offset: Vec3<T>) -> AircraftState<T> {
    AircraftState { x: s.x + offset.x, y: s.y + offset.y, z: s.z + offset.z, ..*s }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Stream};
    use std::f64::consts::PI;

    fn at(x: f64, y: f64, z: f64, psi: f64) -> AircraftState<f64> {
        AircraftState { x, y, z, v: 300.0, gamma: 0.0, psi }
    }

    fn cfg() -> EngagementConfig<f64> {
        EngagementConfig::default()
    }

    #[test]
    fn head_on_degenerate_sampling() {
        let c = EngagementConfig { azimuth_range: (0.0, 0.0), distance_range: (50_000.0, 50_000.0), ..cfg() };
        let mut rng = substream(1, Stream::Engagement, &[]);
        let (r, b) = sample_initial(&c, &mut rng);
        assert_eq!(b.x - r.x, 50_000.0);
        let gr = relative_geometry(&r, &b);
        let gb = relative_geometry(&b, &r);
        assert_eq!(gr.bearing, 0.0);
        assert!(gb.bearing.abs() < 1e-12);
    }

    #[test]
    fn first_angle_stage_sampling_bounds() {
        let c = EngagementConfig {
            azimuth_range: (-PI / 10.0, PI / 10.0),
            distance_range: (50_000.0, 60_000.0),
            ..cfg()
        };
        let mut rng = substream(2, Stream::Engagement, &[]);
        for _ in 0..2000 {
            let (r, b) = sample_initial(&c, &mut rng);
            let sep = (b.x - r.x).hypot(b.y - r.y);
            assert!((50_000.0..=60_000.0).contains(&sep));
            assert!(relative_geometry(&r, &b).bearing.abs() <= PI / 10.0 + 1e-12);
            assert!(relative_geometry(&b, &r).bearing.abs() <= PI / 10.0 + 1e-12);
            assert!(r.is_valid() && b.is_valid());
        }
    }

    #[test]
    fn observation_dead_ahead() {
        let c = cfg();
        let own = Fighter::new(at(0.0, 0.0, 8000.0, 0.0));
        let opp = Fighter::new(at(c.radar_range / 2.0, 0.0, 8000.0, PI));
        let o = build_observation(&own, &opp, &c);
        assert_eq!(o.0[3], 0.0);
        assert_eq!(o.0[5], 0.5);
        assert_eq!(o.0[8], 1.0);
        assert!(o.0.iter().all(|x| (-1.0..=1.0).contains(x)));
    }

    #[test]
    fn observation_masks_opponent_behind() {
        let c = cfg();
        let own = Fighter::new(at(0.0, 0.0, 8000.0, 0.0));
        let opp = Fighter::new(at(-30_000.0, 0.0, 8000.0, 0.0));
        let o = build_observation(&own, &opp, &c);
        assert!(o.0[3..8].iter().all(|x| *x == 0.0));
        assert_eq!(o.0[11], 0.0);
        assert!(!o.opponent_visible());
    }

    #[test]
    fn steady_flight_gives_zero_rewards() {
        let mut e = Engagement::new(cfg(), at(0.0, 0.0, 8000.0, 0.0), at(100_000.0, 0.0, 8000.0, PI / 2.0)).unwrap();
        for _ in 0..10 {
            let r = e.advance(&Action::level(), &Action::level()).unwrap();
            assert_eq!(r.rewards, [0, 0]);
            assert!(r.outcome.is_none());
        }
        assert!((e.time() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn timeout_with_no_launch_is_a_draw() {
        let mut e = Engagement::new(cfg(), at(0.0, 0.0, 8000.0, PI / 2.0), at(100_000.0, 0.0, 8000.0, PI / 2.0)).unwrap();
        let mut last = None;
        let mut steps = 0;
        while last.is_none() {
            last = e.advance(&Action::level(), &Action::level()).unwrap().outcome;
            steps += 1;
        }
        assert_eq!(last, Some(Outcome::Draw(Termination::Timeout)));
        assert_eq!(steps, 1000);
        assert!(e.advance(&Action::level(), &Action::level()).is_err());
    }

    #[test]
    fn red_head_on_shot_wins() {
        let mut e = Engagement::new(cfg(), at(0.0, 0.0, 8000.0, 0.0), at(50_000.0, 0.0, 8000.0, PI)).unwrap();
        let fire = Action { fire: true, ..Action::level() };
        let first = e.advance(&fire, &Action::level()).unwrap();
        assert_eq!(first.rewards, [0, 0]);
        assert!(e.fighter(Side::Red).missile.is_some());
        assert!(e.fighter(Side::Blue).missile.is_none());
        let mut report = first;
        while report.outcome.is_none() {
            report = e.advance(&Action::level(), &Action::level()).unwrap();
            if report.outcome.is_none() {
                assert_eq!(report.rewards, [0, 0]);
            }
        }
        assert_eq!(report.outcome, Some(Outcome::RedWins(Termination::Hit)));
        assert_eq!(report.rewards, [1, -1]);
    }

    #[test]
    fn fire_outside_radar_cone_is_ignored() {
        let mut e = Engagement::new(cfg(), at(0.0, 0.0, 8000.0, PI), at(50_000.0, 0.0, 8000.0, PI)).unwrap();
        let fire = Action { fire: true, ..Action::level() };
        e.advance(&fire, &Action::level()).unwrap();
        assert!(e.fighter(Side::Red).missile.is_none());
        assert_eq!(e.fighter(Side::Red).magazine.remaining, 1);
    }

    #[test]
    fn ground_contact_defeats_that_side() {
        let mut e = Engagement::new(cfg(), at(0.0, 0.0, 50.0, 0.0), at(90_000.0, 0.0, 8000.0, 0.0)).unwrap();
        let dive = Action { control: ControlInput::new(0.0, 0.0, 0.0), fire: false };
        let mut report = e.advance(&dive, &Action::level()).unwrap();
        while report.outcome.is_none() {
            report = e.advance(&dive, &Action::level()).unwrap();
        }
        assert_eq!(report.outcome, Some(Outcome::BlueWins(Termination::GroundContact)));
        assert_eq!(report.rewards, [-1, 1]);
    }

    #[test]
    fn outcome_helpers() {
        let o = Outcome::RedWins(Termination::Hit);
        assert_eq!(o.swapped(), Outcome::BlueWins(Termination::Hit));
        assert_eq!(o.reward_for(Side::Blue), -1);
        let mut t = Tally::default();
        t.record(&o, Side::Red);
        t.record(&o, Side::Blue);
        t.record(&Outcome::Draw(Termination::Timeout), Side::Red);
        assert_eq!((t.wins, t.losses, t.draws), (1, 1, 1));
    }

    #[test]
    fn max_steps_bound() {
        assert_eq!(cfg().max_steps(), 1000);
    }
}
