use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::scalar::Scalar;

/// Kinematic state of the robot or one human.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AgentState<T> {
    pub position: Vec2<T>,
    pub velocity: Vec2<T>,
    pub radius: T,
    pub goal: Vec2<T>,
    pub v_max: T,
    /// Heading in radians; only unicycle kinematics reads it.
    pub heading: T,
}

impl<T: Scalar> AgentState<T> {
    /// An agent at rest at `position`, heading toward `goal`.
    pub fn at_rest(position: Vec2<T>, goal: Vec2<T>, radius: T, v_max: T) -> Self {
        let to_goal = goal - position;
        Self {
            position,
            velocity: Vec2::zero(),
            radius,
            goal,
            v_max,
            heading: to_goal.y.atan2(to_goal.x),
        }
    }

    #[inline]
    pub fn distance_to_goal(&self) -> T {
        self.position.distance(self.goal)
    }

    /// Distance between the two discs' boundaries; negative when they overlap.
    #[inline]
    pub fn surface_distance(&self, other: &Self) -> T {
        self.position.distance(other.position) - self.radius - other.radius
    }

    /// Velocity toward the goal at full speed that lands exactly on the goal
    /// instead of overshooting it within one step of length `dt`.
    pub fn preferred_velocity(&self, dt: T) -> Vec2<T> {
        ((self.goal - self.position) / dt).clamp_norm(self.v_max)
    }

    pub fn is_finite(&self) -> bool {
        self.position.is_finite()
            && self.velocity.is_finite()
            && self.goal.is_finite()
            && self.radius.is_finite()
            && self.v_max.is_finite()
            && self.heading.is_finite()
    }
}
