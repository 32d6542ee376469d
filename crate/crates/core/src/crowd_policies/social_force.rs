use serde::{Deserialize, Serialize};

use crate::agent::AgentState;
use crate::geometry::Vec2;
use crate::scalar::Scalar;

/// Parameters of the social force pedestrian model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields, default)]
pub struct SocialForceParams<T> {
    /// Time constant (s) of the relaxation toward the desired velocity.
    pub relaxation_time: T,
    /// Repulsive acceleration (m/s^2) at contact.
    pub interaction_strength: T,
    /// Decay length (m) of the repulsion.
    pub interaction_range: T,
}

impl<T: Scalar> Default for SocialForceParams<T> {
    fn default() -> Self {
        Self {
            relaxation_time: T::lit(0.5),
            interaction_strength: T::lit(5.0),
            interaction_range: T::lit(0.3),
        }
    }
}

/// Unit direction used when two agents share the same center.
fn coincident_direction<T: Scalar>() -> Vec2<T> {
    Vec2::new(T::one(), T::zero())
}

/// Velocity after one step of length `dt` under goal attraction plus
/// exponential repulsion from every neighbor, capped at `v_max`.
pub fn social_force_velocity<T: Scalar>(
    agent: &AgentState<T>,
    neighbors: &[AgentState<T>],
    goal: Vec2<T>,
    params: &SocialForceParams<T>,
    dt: T,
) -> Vec2<T> {
    let desired = (goal - agent.position).normalized() * agent.v_max;
    let mut force = (desired - agent.velocity) / params.relaxation_time;
    for other in neighbors {
        let offset = agent.position - other.position;
        let dist = offset.norm();
        let normal = if dist > T::zero() {
            offset / dist
        } else {
            coincident_direction()
        };
        let magnitude = params.interaction_strength
            * ((agent.radius + other.radius - dist) / params.interaction_range).exp();
        force += normal * magnitude;
    }
    (agent.velocity + force * dt).clamp_norm(agent.v_max)
}
