//! Reactive pedestrian controllers. Humans only ever see other humans.

mod linear_program;
mod orca;
mod social_force;

use serde::{Deserialize, Serialize};

pub use orca::{orca_velocity, OrcaParams};
pub use social_force::{social_force_velocity, SocialForceParams};

/// Which reactive model drives the simulated humans.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HumanPolicy {
    #[default]
    Orca,
    #[serde(alias = "social_force")]
    Sf,
}
