use serde::{Deserialize, Serialize};

use super::linear_program::{linear_program2, linear_program3, Line};
use crate::agent::AgentState;
use crate::geometry::Vec2;
use crate::scalar::Scalar;

/// Parameters of optimal reciprocal collision avoidance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields, default)]
pub struct OrcaParams<T> {
    /// Seconds ahead for which collisions are avoided.
    pub time_horizon: T,
    /// Neighbors farther than this (center to center) are ignored.
    pub neighbor_dist: T,
    pub max_neighbors: usize,
    /// Extra clearance added to every pair's combined radius.
    pub safety_margin: T,
}

impl<T: Scalar> Default for OrcaParams<T> {
    fn default() -> Self {
        Self {
            time_horizon: T::lit(5.0),
            neighbor_dist: T::lit(5.0),
            max_neighbors: 10,
            safety_margin: T::lit(0.15),
        }
    }
}

/// Indices of up to `max_neighbors` neighbors within `neighbor_dist`, nearest first.
fn nearest_neighbors<T: Scalar>(
    agent: &AgentState<T>,
    neighbors: &[AgentState<T>],
    params: &OrcaParams<T>,
) -> Vec<usize> {
    let range_sq = params.neighbor_dist * params.neighbor_dist;
    let mut picked: Vec<(T, usize)> = neighbors
        .iter()
        .enumerate()
        .map(|(i, n)| ((n.position - agent.position).norm_sq(), i))
        .filter(|(d, _)| *d < range_sq)
        .collect();
    // Stable sort: equal distances keep input order.
    picked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    picked.truncate(params.max_neighbors);
    picked.into_iter().map(|(_, i)| i).collect()
}

/// The half-plane of velocities that avoids `other` for the time horizon,
/// taking half the responsibility for the avoidance.
fn orca_line<T: Scalar>(
    agent: &AgentState<T>,
    other: &AgentState<T>,
    params: &OrcaParams<T>,
    dt: T,
) -> Line<T> {
    let half = T::lit(0.5);
    let inv_time_horizon = T::one() / params.time_horizon;
    let relative_position = other.position - agent.position;
    let relative_velocity = agent.velocity - other.velocity;
    let dist_sq = relative_position.norm_sq();
    let combined_radius = agent.radius + other.radius + params.safety_margin;
    let combined_radius_sq = combined_radius * combined_radius;

    let (direction, u);
    if dist_sq > combined_radius_sq {
        // Vector from the cutoff circle center to the relative velocity.
        let w = relative_velocity - relative_position * inv_time_horizon;
        let w_length_sq = w.norm_sq();
        let dot1 = w.dot(relative_position);

        if dot1 < T::zero() && dot1 * dot1 > combined_radius_sq * w_length_sq {
            // Project on the cutoff circle.
            let w_length = w_length_sq.sqrt();
            let unit_w = w / w_length;
            direction = Vec2::new(unit_w.y, -unit_w.x);
            u = unit_w * (combined_radius * inv_time_horizon - w_length);
        } else {
            // Project on the nearer leg; exact ties go to the left leg.
            let leg = (dist_sq - combined_radius_sq).sqrt();
            let det = relative_position.det(w);
            let tie = det.abs() <= T::epsilon() * relative_position.norm() * w.norm();
            direction = if det > T::zero() || tie {
                Vec2::new(
                    relative_position.x * leg - relative_position.y * combined_radius,
                    relative_position.x * combined_radius + relative_position.y * leg,
                ) / dist_sq
            } else {
                -Vec2::new(
                    relative_position.x * leg + relative_position.y * combined_radius,
                    -relative_position.x * combined_radius + relative_position.y * leg,
                ) / dist_sq
            };
            let dot2 = relative_velocity.dot(direction);
            u = direction * dot2 - relative_velocity;
        }
    } else {
        // Already overlapping: resolve within one time step.
        let inv_time_step = T::one() / dt;
        let w = relative_velocity - relative_position * inv_time_step;
        let w_length = w.norm();
        let unit_w = if w_length > T::zero() {
            w / w_length
        } else {
            Vec2::new(-T::one(), T::zero())
        };
        direction = Vec2::new(unit_w.y, -unit_w.x);
        u = unit_w * (combined_radius * inv_time_step - w_length);
    }

    Line {
        point: agent.velocity + u * half,
        direction,
    }
}

/// New velocity for `agent`: the velocity closest to `preferred` that satisfies
/// every reciprocal avoidance constraint, within the `v_max` disc. When the
/// constraints conflict, the velocity of least maximum violation is returned.
pub fn orca_velocity<T: Scalar>(
    agent: &AgentState<T>,
    neighbors: &[AgentState<T>],
    preferred: Vec2<T>,
    params: &OrcaParams<T>,
    dt: T,
) -> Vec2<T> {
    let lines: Vec<Line<T>> = nearest_neighbors(agent, neighbors, params)
        .into_iter()
        .map(|i| orca_line(agent, &neighbors[i], params, dt))
        .collect();

    let mut result = Vec2::zero();
    let fail = linear_program2(&lines, agent.v_max, preferred, false, &mut result);
    if fail < lines.len() {
        linear_program3(&lines, fail, agent.v_max, &mut result);
    }
    result.clamp_norm(agent.v_max)
}
