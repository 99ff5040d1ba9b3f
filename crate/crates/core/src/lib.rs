//! Beyond-visual-range air combat: point-mass flight dynamics, missiles,
//! two-aircraft engagements, initial-condition curricula, and self-play PPO
//! training with a small multi-layer perceptron.
//!
//! The simulation core is generic over the scalar type; the aliases below
//! fix it to `f64` (simulation) or `f32` (networks).

pub mod curriculum;
pub mod engagement;
pub mod flightdyn;
pub mod geometry;
pub mod harness;
pub mod missile;
pub mod nn;
pub mod ppo;
pub mod rng;
pub mod scalar;
pub mod side;

pub use scalar::Scalar;
pub use side::Side;

pub type AircraftState = flightdyn::AircraftState<f64>;
pub type ControlInput = flightdyn::ControlInput<f64>;
pub type PhysicsConstants = flightdyn::PhysicsConstants<f64>;
pub type MissileConfig = missile::MissileConfig<f64>;
pub type MissileState = missile::MissileState<f64>;
pub type EngagementConfig = engagement::EngagementConfig<f64>;
pub type Engagement = engagement::Engagement<f64>;
pub type Observation = engagement::Observation<f64>;
pub type Action = engagement::Action<f64>;
pub type Vec3 = geometry::Vec3<f64>;
pub type Mlp = nn::Mlp<f32>;
pub type PolicyParameters = nn::PolicyParameters<f32>;

pub type AircraftStateF32 = flightdyn::AircraftState<f32>;
pub type EngagementF32 = engagement::Engagement<f32>;
pub type MlpF64 = nn::Mlp<f64>;
