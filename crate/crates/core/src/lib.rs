//! Deterministic 2D crowd-navigation engine with transformable Gaussian
//! reward shaping.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`, which the harness uses.

pub mod agent;
pub mod crowd;
pub mod crowd_policies;
pub mod error;
pub mod geometry;
pub mod learner;
pub mod metrics;
pub mod predictors;
pub mod reward_kernel;
pub mod rewards;
pub mod scalar;
pub mod simulator;

pub use agent::AgentState;
pub use error::{Error, Result};
pub use geometry::Vec2;
pub use scalar::Scalar;

pub type Vec2f = geometry::Vec2<f64>;
pub type Agent = agent::AgentState<f64>;
pub type Tgrf = reward_kernel::TgrfParams<f64>;
pub type Rewards = rewards::RewardConfig<f64>;
pub type World = simulator::WorldConfig<f64>;
pub type Sim = simulator::Simulator<f64>;
pub type Record = simulator::EpisodeRecord<f64>;
pub type Prediction = predictors::TrajectoryPrediction<f64>;

pub type Report = metrics::MetricsReport<f64>;
