//! K-step human trajectory predictors feeding the prediction penalty.

use serde::{Deserialize, Serialize};

use crate::agent::AgentState;
use crate::crowd::Crowd;
use crate::geometry::Vec2;
use crate::rewards::PredictionOccupancy;
use crate::scalar::Scalar;

/// Which predictor supplies future human positions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictorKind {
    /// No prediction; the prediction penalty is zero.
    #[default]
    None,
    /// Each human keeps its current velocity.
    ConstVel,
    /// Exact rollout of the humans' own policies.
    GroundTruth,
}

/// Predicted centers of one human for steps `1..=K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PredictedTrack<T> {
    pub human: usize,
    pub positions: Vec<Vec2<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TrajectoryPrediction<T> {
    pub horizon: usize,
    pub tracks: Vec<PredictedTrack<T>>,
}

impl<T: Scalar> TrajectoryPrediction<T> {
    /// Predicted center of `track` at step `k` in `1..=horizon`.
    pub fn at(&self, track: usize, k: usize) -> Vec2<T> {
        self.tracks[track].positions[k - 1]
    }

    /// Overlap of the robot's disc with each predicted human disc, one row per
    /// track. `humans` supplies the radii, indexed by human id.
    pub fn occupancy(&self, robot: &AgentState<T>, humans: &[AgentState<T>]) -> PredictionOccupancy {
        PredictionOccupancy::from_fn(self.tracks.len(), self.horizon, |i, k| {
            let track = &self.tracks[i];
            let reach = robot.radius + humans[track.human].radius;
            robot.position.distance(track.positions[k - 1]) <= reach
        })
    }
}

/// `p + k * dt * v` for each `(id, state)` and `k` in `1..=horizon`.
pub fn const_vel_predict<'a, T: Scalar>(
    humans: impl IntoIterator<Item = (usize, &'a AgentState<T>)>,
    horizon: usize,
    dt: T,
) -> TrajectoryPrediction<T> {
    let tracks = humans
        .into_iter()
        .map(|(human, state)| PredictedTrack {
            human,
            positions: (1..=horizon)
                .map(|k| state.position + state.velocity * (T::lit(k as f64) * dt))
                .collect(),
        })
        .collect();
    TrajectoryPrediction { horizon, tracks }
}

/// Rolls a clone of the crowd forward `horizon` steps and reports where the
/// humans in `visible` actually end up.
pub fn ground_truth_predict<T: Scalar>(crowd: &Crowd<T>, visible: &[usize], horizon: usize) -> TrajectoryPrediction<T> {
    let mut rollout = crowd.clone();
    let mut tracks: Vec<PredictedTrack<T>> = visible
        .iter()
        .map(|&human| PredictedTrack {
            human,
            positions: Vec::with_capacity(horizon),
        })
        .collect();
    for _ in 0..horizon {
        rollout.step();
        for track in &mut tracks {
            track.positions.push(rollout.humans()[track.human].position);
        }
    }
    TrajectoryPrediction { horizon, tracks }
}
