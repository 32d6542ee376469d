use serde::{Deserialize, Serialize};

use crate::agent::AgentState;
use crate::geometry::Vec2;
use crate::predictors::TrajectoryPrediction;
use crate::scalar::Scalar;
use crate::simulator::Kinematics;

/// One human inside the robot's sensor range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct HumanObservation<T> {
    pub id: usize,
    pub position: Vec2<T>,
    /// Up to `M` earlier positions, oldest first.
    pub past: Vec<Vec2<T>>,
}

impl<T: Scalar> HumanObservation<T> {
    /// Finite-difference velocity from the most recent remembered position.
    pub fn estimated_velocity(&self, dt: T) -> Option<Vec2<T>> {
        self.past.last().map(|&prev| (self.position - prev) / dt)
    }
}

/// What the robot knows at one instant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Observation<T> {
    pub step: usize,
    pub dt: T,
    pub kinematics: Kinematics,
    pub robot: AgentState<T>,
    pub humans: Vec<HumanObservation<T>>,
    /// Visibility of every human id `0..n_max`.
    pub visible: Vec<bool>,
    pub prediction: Option<TrajectoryPrediction<T>>,
}

/// Version of the flat observation layout; bump on any change of field order.
pub const OBSERVATION_LAYOUT_VERSION: u32 = 1;

/// Field order of [`Observation::flatten`]:
///
/// 1. robot: `px, py, vx, vy, gx, gy, v_max, heading, radius`
/// 2. for each human id `0..n_max`: `px, py` (zeros when not visible)
/// 3. visibility mask, `1.0` or `0.0` per human id
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationLayout {
    pub version: u32,
    pub n_max: usize,
}

impl ObservationLayout {
    pub const ROBOT_FIELDS: usize = 9;
    pub const HUMAN_FIELDS: usize = 2;

    pub fn new(n_max: usize) -> Self {
        Self {
            version: OBSERVATION_LAYOUT_VERSION,
            n_max,
        }
    }

    pub fn len(&self) -> usize {
        Self::ROBOT_FIELDS + self.n_max * (Self::HUMAN_FIELDS + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn human_offset(&self, id: usize) -> usize {
        Self::ROBOT_FIELDS + id * Self::HUMAN_FIELDS
    }

    pub fn mask_offset(&self) -> usize {
        Self::ROBOT_FIELDS + self.n_max * Self::HUMAN_FIELDS
    }
}

impl<T: Scalar> Observation<T> {
    pub fn layout(&self) -> ObservationLayout {
        ObservationLayout::new(self.visible.len())
    }

    pub fn flatten(&self) -> Vec<T> {
        let layout = self.layout();
        let mut out = vec![T::zero(); layout.len()];
        let r = &self.robot;
        out[..ObservationLayout::ROBOT_FIELDS].copy_from_slice(&[
            r.position.x,
            r.position.y,
            r.velocity.x,
            r.velocity.y,
            r.goal.x,
            r.goal.y,
            r.v_max,
            r.heading,
            r.radius,
        ]);
        for h in &self.humans {
            let at = layout.human_offset(h.id);
            out[at] = h.position.x;
            out[at + 1] = h.position.y;
        }
        let mask = layout.mask_offset();
        for (i, &seen) in self.visible.iter().enumerate() {
            out[mask + i] = if seen { T::one() } else { T::zero() };
        }
        out
    }
}
