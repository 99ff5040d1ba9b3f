//! Air-to-air missile: flight model, proportional-navigation guidance and
//! hit/miss adjudication.
//!
//! A missile leaves the rail in the midcourse phase, guided on target data
//! relayed by the launching aircraft, and hands over to its own seeker once
//! inside `seeker_activation_range`. It is lost if the relevant sensor (the
//! shooter's radar in midcourse, the seeker in terminal) loses the target
//! beyond its azimuth limit, or if it flies longer than `max_flight_time`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flightdyn::AircraftState;
use crate::geometry::{angle_between, closest_approach, Vec3};
use crate::scalar::Scalar;
use crate::side::Side;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MissileError {
    #[error("{0:?} has no missile remaining")]
    NoMissileRemaining(Side),
    #[error("invalid missile configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GuidancePhase {
    Midcourse,
    Terminal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissileStatus {
    InFlight,
    Hit,
    Missed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissReason {
    FlightTime,
    /// Target left the shooter's radar cone during midcourse.
    DatalinkLost,
    /// Target left the seeker cone during terminal guidance.
    SeekerLost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar + serde::de::DeserializeOwned"))]
pub struct MissileConfig<T> {
    pub hit_radius: T,
    pub max_flight_time: T,
    pub midcourse_azimuth_limit: T,
    pub terminal_azimuth_limit: T,
    pub seeker_activation_range: T,
    pub nav_constant: T,
    pub boost_duration: T,
    pub boost_accel: T,
    /// Drag deceleration per squared speed, 1/m.
    pub drag_coefficient: T,
    pub max_lateral_accel: T,
}

impl<T: Scalar> Default for MissileConfig<T> {
    fn default() -> Self {
        Self {
            hit_radius: T::lit(12.0),
            max_flight_time: T::lit(120.0),
            midcourse_azimuth_limit: T::FRAC_PI_3(),
            terminal_azimuth_limit: T::FRAC_PI_2(),
            seeker_activation_range: T::lit(20_000.0),
            nav_constant: T::lit(4.0),
            boost_duration: T::lit(6.0),
            boost_accel: T::lit(200.0),
            drag_coefficient: T::lit(2.5e-5),
            max_lateral_accel: T::lit(300.0),
        }
    }
}

impl<T: Scalar> MissileConfig<T> {
    pub fn validate(&self) -> Result<(), MissileError> {
        let fields = [
            ("hit_radius", self.hit_radius),
            ("max_flight_time", self.max_flight_time),
            ("midcourse_azimuth_limit", self.midcourse_azimuth_limit),
            ("terminal_azimuth_limit", self.terminal_azimuth_limit),
            ("seeker_activation_range", self.seeker_activation_range),
            ("nav_constant", self.nav_constant),
            ("boost_duration", self.boost_duration),
            ("boost_accel", self.boost_accel),
            ("drag_coefficient", self.drag_coefficient),
            ("max_lateral_accel", self.max_lateral_accel),
        ];
        for (name, value) in fields {
            if !(value > T::zero() && value.is_finite()) {
                return Err(MissileError::InvalidConfig(format!("{name} must be positive, got {value}")));
            }
        }
        if self.terminal_azimuth_limit <= self.midcourse_azimuth_limit {
            return Err(MissileError::InvalidConfig(
                "terminal_azimuth_limit must exceed midcourse_azimuth_limit".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissileState<T> {
    pub position: Vec3<T>,
    pub velocity: Vec3<T>,
    pub flight_time: T,
    pub phase: GuidancePhase,
    pub status: MissileStatus,
    pub miss_reason: Option<MissReason>,
    pub shooter_id: Side,
    pub target_id: Side,
    pub min_distance_so_far: T,
}

impl<T: Scalar> MissileState<T> {
    pub fn speed(&self) -> T {
        self.velocity.norm()
    }

    pub fn is_in_flight(&self) -> bool {
        self.status == MissileStatus::InFlight
    }
}

/// Missiles carried by one aircraft.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Magazine {
    pub remaining: u32,
}

impl Default for Magazine {
    fn default() -> Self {
        Self { remaining: 1 }
    }
}

impl Magazine {
    /// Spawns a missile at the shooter with the shooter's velocity.
    pub fn launch<T: Scalar>(
        &mut self,
        shooter: &AircraftState<T>,
        shooter_id: Side,
        target_id: Side,
    ) -> Result<MissileState<T>, MissileError> {
        if self.remaining == 0 {
            return Err(MissileError::NoMissileRemaining(shooter_id));
        }
        self.remaining -= 1;
        Ok(MissileState {
            position: shooter.position(),
            velocity: shooter.velocity(),
            flight_time: T::zero(),
            phase: GuidancePhase::Midcourse,
            status: MissileStatus::InFlight,
            miss_reason: None,
            shooter_id,
            target_id,
            min_distance_so_far: T::infinity(),
        })
    }
}

/// Proportional-navigation lateral acceleration command.
///
/// `a = N · ω × v_m`, with `ω = (r × v_rel) / |r|²` the line-of-sight rate.
/// The result is perpendicular to the missile velocity and its magnitude is
/// limited to `max_lateral_accel`.
pub fn guidance_accel<T: Scalar>(
    missile: &MissileState<T>,
    target: &AircraftState<T>,
    config: &MissileConfig<T>,
) -> Vec3<T> {
    let r = target.position() - missile.position;
    let range_sq = r.norm_sq();
    if range_sq == T::zero() {
        return Vec3::zero();
    }
    let v_rel = target.velocity() - missile.velocity;
    let los_rate = r.cross(v_rel) * range_sq.recip();
    let accel = los_rate.cross(missile.velocity) * config.nav_constant;
    let mag = accel.norm();
    if mag > config.max_lateral_accel {
        accel * (config.max_lateral_accel / mag)
    } else {
        accel
    }
}

/// Speed after `dt` seconds starting `t` seconds after launch.
fn propagate_speed<T: Scalar>(speed: T, t: T, dt: T, config: &MissileConfig<T>) -> T {
    let boost_left = (config.boost_duration - t).max(T::zero()).min(dt);
    let boosted = speed + config.boost_accel * boost_left;
    let coast = dt - boost_left;
    if coast > T::zero() {
        // Exact solution of dv/dt = -k v².
        boosted / (T::one() + config.drag_coefficient * boosted * coast)
    } else {
        boosted
    }
}

/// Moves an in-flight missile forward by `dt` and applies the hit/miss rules.
///
/// `target_before`/`target_after` bracket the target's motion over the same
/// interval; the hit test uses the closest approach of the two linear
/// segments, so a fast crossing between samples is still caught. `shooter`
/// is the launching aircraft at the end of the interval. Missiles that have
/// already terminated are returned unchanged.
pub fn step_and_adjudicate<T: Scalar>(
    missile: &MissileState<T>,
    shooter: &AircraftState<T>,
    target_before: &AircraftState<T>,
    target_after: &AircraftState<T>,
    config: &MissileConfig<T>,
    dt: T,
) -> MissileState<T> {
    if !missile.is_in_flight() {
        return *missile;
    }
    let mut next = *missile;
    let speed = missile.speed();
    let dir = missile.velocity * speed.recip();
    let lateral = guidance_accel(missile, target_before, config);

    let new_speed = propagate_speed(speed, missile.flight_time, dt, config);
    let lat_mag = lateral.norm();
    let new_dir = if lat_mag > T::zero() {
        // Rotate the velocity direction towards the command at rate a/v.
        let turn = lat_mag / speed * dt;
        let (s, c) = turn.sin_cos();
        (dir * c + lateral * (s / lat_mag)).normalized().unwrap_or(dir)
    } else {
        dir
    };
    next.velocity = new_dir * new_speed;
    let half = T::lit(0.5);
    next.position = missile.position + (missile.velocity + next.velocity) * (half * dt);
    next.flight_time = missile.flight_time + dt;

    let cpa = closest_approach(missile.position, next.position, target_before.position(), target_after.position());
    next.min_distance_so_far = missile.min_distance_so_far.min(cpa);

    adjudicate(&mut next, shooter, target_after, config);
    next
}

/// Applies, in priority order: hit, flight-time limit, phase hand-over, and
/// the azimuth limit of the current guidance phase.
pub fn adjudicate<T: Scalar>(
    missile: &mut MissileState<T>,
    shooter: &AircraftState<T>,
    target: &AircraftState<T>,
    config: &MissileConfig<T>,
) {
    if !missile.is_in_flight() {
        return;
    }
    if missile.min_distance_so_far < config.hit_radius {
        missile.status = MissileStatus::Hit;
        return;
    }
    if missile.flight_time > config.max_flight_time {
        missile.miss(MissReason::FlightTime);
        return;
    }
    let los = target.position() - missile.position;
    if missile.phase == GuidancePhase::Midcourse && los.norm() <= config.seeker_activation_range {
        missile.phase = GuidancePhase::Terminal;
    }
    match missile.phase {
        GuidancePhase::Midcourse => {
            let shooter_los = target.position() - shooter.position();
            if angle_between(shooter.nose(), shooter_los) > config.midcourse_azimuth_limit {
                missile.miss(MissReason::DatalinkLost);
            }
        }
        GuidancePhase::Terminal => {
            if angle_between(missile.velocity, los) > config.terminal_azimuth_limit {
                missile.miss(MissReason::SeekerLost);
            }
        }
    }
}

impl<T> MissileState<T> {
    fn miss(&mut self, reason: MissReason) {
        self.status = MissileStatus::Missed;
        self.miss_reason = Some(reason);
    }
}
