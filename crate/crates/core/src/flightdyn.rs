//! Three-degree-of-freedom point-mass aircraft model.
//!
//! The state is position, airspeed, flight-path angle and heading; the
//! controls are the longitudinal load factor, the normal load factor and the
//! bank angle. Motion is integrated with classical fourth-order Runge-Kutta
//! at a fixed physics step, with controls held over a longer decision
//! interval.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{wrap_angle, Vec3};
use crate::scalar::Scalar;

pub const MIN_SPEED: f64 = 250.0;
pub const MAX_SPEED: f64 = 400.0;
/// Flight-path angle limit; keeps `cos γ` well away from zero.
pub const MAX_GAMMA: f64 = 1.48;

pub const NX_MIN: f64 = -1.0;
pub const NX_MAX: f64 = 2.0;
pub const NZ_MIN: f64 = 0.0;
pub const NZ_MAX: f64 = 8.0;

const SINGULAR_COS_GAMMA: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlightError {
    #[error("flight-path angle {gamma} makes the heading rate singular")]
    Singular { gamma: f64 },
    #[error("decision interval {decision} is not a positive multiple of the physics step {physics}")]
    BadTiming { physics: f64, decision: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AircraftState<T> {
    pub x: T,
    pub y: T,
    /// Altitude.
    pub z: T,
    /// Airspeed, m/s.
    pub v: T,
    /// Flight-path angle, rad.
    pub gamma: T,
    /// Heading, rad, in (−π, π].
    pub psi: T,
}

impl<T: Scalar> AircraftState<T> {
    pub fn position(&self) -> Vec3<T> {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn velocity(&self) -> Vec3<T> {
        Vec3::from_angles(self.gamma, self.psi) * self.v
    }

    /// Unit vector along the velocity (the nose, for a point mass).
    pub fn nose(&self) -> Vec3<T> {
        Vec3::from_angles(self.gamma, self.psi)
    }

    fn to_array(self) -> [T; 6] {
        [self.x, self.y, self.z, self.v, self.gamma, self.psi]
    }

    fn from_array(a: [T; 6]) -> Self {
        Self { x: a[0], y: a[1], z: a[2], v: a[3], gamma: a[4], psi: a[5] }
    }

    /// Applies the speed and flight-path limits and wraps the heading.
    pub fn clamped(mut self) -> Self {
        self.v = self.v.max(T::lit(MIN_SPEED)).min(T::lit(MAX_SPEED));
        self.gamma = self.gamma.max(T::lit(-MAX_GAMMA)).min(T::lit(MAX_GAMMA));
        self.psi = wrap_angle(self.psi);
        self
    }

    pub fn is_valid(&self) -> bool {
        let finite = self.to_array().iter().all(|c| c.is_finite());
        finite
            && self.v >= T::lit(MIN_SPEED)
            && self.v <= T::lit(MAX_SPEED)
            && self.gamma.abs() < T::FRAC_PI_2()
            && self.psi > -T::PI()
            && self.psi <= T::PI()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput<T> {
    /// Longitudinal load factor.
    pub nx: T,
    /// Normal load factor.
    pub nz: T,
    /// Bank angle, rad.
    pub mu: T,
}

impl<T: Scalar> ControlInput<T> {
    pub fn new(nx: T, nz: T, mu: T) -> Self {
        Self { nx, nz, mu }
    }

    /// Straight and level: thrust balances drag, lift balances weight.
    pub fn level() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn clamped(self) -> Self {
        Self {
            nx: self.nx.max(T::lit(NX_MIN)).min(T::lit(NX_MAX)),
            nz: self.nz.max(T::lit(NZ_MIN)).min(T::lit(NZ_MAX)),
            mu: self.mu.max(-T::PI()).min(T::PI()),
        }
    }

    pub fn is_valid(&self) -> bool {
        *self == self.clamped() && self.nx.is_finite() && self.nz.is_finite() && self.mu.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar + serde::de::DeserializeOwned"))]
pub struct PhysicsConstants<T> {
    pub g: T,
    pub dt_physics: T,
    pub dt_decision: T,
}

impl<T: Scalar> Default for PhysicsConstants<T> {
    fn default() -> Self {
        Self { g: T::lit(9.81), dt_physics: T::lit(0.02), dt_decision: T::lit(0.2) }
    }
}

impl<T: Scalar> PhysicsConstants<T> {
    /// Number of physics steps per decision interval.
    pub fn substeps(&self) -> Result<usize, FlightError> {
        let ratio = (self.dt_decision / self.dt_physics).as_f64();
        let n = ratio.round();
        let ok = self.dt_physics > T::zero() && n >= 1.0 && (ratio - n).abs() < 1e-9 * n.max(1.0);
        if ok {
            Ok(n as usize)
        } else {
            Err(FlightError::BadTiming { physics: self.dt_physics.as_f64(), decision: self.dt_decision.as_f64() })
        }
    }
}

/// Time derivative of [`AircraftState`], component for component.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateRate<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub v: T,
    pub gamma: T,
    pub psi: T,
}

impl<T: Scalar> StateRate<T> {
    fn to_array(self) -> [T; 6] {
        [self.x, self.y, self.z, self.v, self.gamma, self.psi]
    }
}

/// Point-mass equations of motion.
pub fn derivatives<T: Scalar>(
    state: &AircraftState<T>,
    control: &ControlInput<T>,
    consts: &PhysicsConstants<T>,
) -> Result<StateRate<T>, FlightError> {
    if state.gamma.cos().abs() <= T::lit(SINGULAR_COS_GAMMA) {
        return Err(FlightError::Singular { gamma: state.gamma.as_f64() });
    }
    Ok(rates(state, control, consts.g))
}

#[inline]
fn rates<T: Scalar>(s: &AircraftState<T>, c: &ControlInput<T>, g: T) -> StateRate<T> {
    let (sin_g, cos_g) = (s.gamma.sin(), s.gamma.cos());
    let (sin_psi, cos_psi) = (s.psi.sin(), s.psi.cos());
    let (sin_mu, cos_mu) = (c.mu.sin(), c.mu.cos());
    StateRate {
        x: s.v * cos_g * cos_psi,
        y: s.v * cos_g * sin_psi,
        z: s.v * sin_g,
        v: g * (c.nx - sin_g),
        gamma: g / s.v * (c.nz * cos_mu - cos_g),
        psi: g / (s.v * cos_g) * c.nz * sin_mu,
    }
}

fn axpy<T: Scalar>(base: [T; 6], k: T, d: [T; 6]) -> [T; 6] {
    let mut out = base;
    for (o, di) in out.iter_mut().zip(d) {
        *o += k * di;
    }
    out
}

/// One RK4 step of length `dt` with no limits applied afterwards.
pub fn rk4_unclamped<T: Scalar>(
    state: &AircraftState<T>,
    control: &ControlInput<T>,
    g: T,
    dt: T,
) -> AircraftState<T> {
    let two = T::lit(2.0);
    let half = dt / two;
    let y0 = state.to_array();
    let f = |y: [T; 6]| rates(&AircraftState::from_array(y), control, g).to_array();
    let k1 = f(y0);
    let k2 = f(axpy(y0, half, k1));
    let k3 = f(axpy(y0, half, k2));
    let k4 = f(axpy(y0, dt, k3));
    let sixth = dt / T::lit(6.0);
    let mut y = y0;
    for i in 0..6 {
        y[i] += sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
    }
    AircraftState::from_array(y)
}

/// Advances by one physics step and applies the state limits.
pub fn step<T: Scalar>(
    state: &AircraftState<T>,
    control: &ControlInput<T>,
    consts: &PhysicsConstants<T>,
) -> AircraftState<T> {
    rk4_unclamped(state, control, consts.g, consts.dt_physics).clamped()
}
