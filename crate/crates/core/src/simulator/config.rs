use serde::{Deserialize, Serialize};

use crate::crowd_policies::{HumanPolicy, OrcaParams, SocialForceParams};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kinematics {
    /// Velocity `(v_x, v_y)` applied directly.
    #[default]
    Holonomic,
    /// Forward speed and turn rate `(v, omega)`.
    Unicycle,
}

/// Arena, population, sensing, timing and randomization parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields, default)]
pub struct WorldConfig<T> {
    /// Side length (m) of the square spawn region centered on the origin.
    pub arena_size: T,
    pub n_humans: usize,
    pub sensor_range: T,
    /// Field of view in degrees, centered on the robot heading.
    pub fov_deg: T,
    pub dt: T,
    /// Episode time limit in seconds.
    pub time_limit: T,
    pub robot_radius: T,
    pub robot_v_max: T,
    pub human_radius_range: [T; 2],
    pub human_vmax_range: [T; 2],
    pub human_policy: HumanPolicy,
    pub orca: OrcaParams<T>,
    pub social_force: SocialForceParams<T>,
    /// Per-step probability that a human abandons its goal for a new one.
    pub goal_change_prob: T,
    pub min_start_goal_separation: T,
    /// Minimum free gap (m) between any two discs at spawn.
    pub spawn_clearance: T,
    /// Goal reached when the robot center is within this distance of it.
    pub goal_tolerance: T,
    pub kinematics: Kinematics,
    /// Past positions remembered per visible human.
    pub memory: usize,
    pub seed: u64,
}

impl<T: Scalar> Default for WorldConfig<T> {
    fn default() -> Self {
        Self {
            arena_size: T::lit(12.0),
            n_humans: 20,
            sensor_range: T::lit(5.0),
            fov_deg: T::lit(360.0),
            dt: T::lit(0.25),
            time_limit: T::lit(50.0),
            robot_radius: T::lit(0.3),
            robot_v_max: T::lit(1.0),
            human_radius_range: [T::lit(0.3), T::lit(0.5)],
            human_vmax_range: [T::lit(0.5), T::lit(1.5)],
            human_policy: HumanPolicy::Orca,
            orca: OrcaParams::default(),
            social_force: SocialForceParams::default(),
            goal_change_prob: T::zero(),
            min_start_goal_separation: T::lit(6.0),
            spawn_clearance: T::lit(0.1),
            goal_tolerance: T::lit(0.3),
            kinematics: Kinematics::Holonomic,
            memory: 5,
            seed: 0,
        }
    }
}

impl<T: Scalar> WorldConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("arena_size", self.arena_size),
            ("sensor_range", self.sensor_range),
            ("fov_deg", self.fov_deg),
            ("dt", self.dt),
            ("time_limit", self.time_limit),
            ("robot_radius", self.robot_radius),
            ("robot_v_max", self.robot_v_max),
            ("goal_tolerance", self.goal_tolerance),
            ("orca.time_horizon", self.orca.time_horizon),
            ("orca.neighbor_dist", self.orca.neighbor_dist),
            ("social_force.relaxation_time", self.social_force.relaxation_time),
            ("social_force.interaction_strength", self.social_force.interaction_strength),
            ("social_force.interaction_range", self.social_force.interaction_range),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(v.is_finite() && *v > T::zero())) {
            return Err(Error::Config(format!("world.{name} must be finite and > 0, got {v}")));
        }
        let non_negative = [
            ("min_start_goal_separation", self.min_start_goal_separation),
            ("spawn_clearance", self.spawn_clearance),
            ("orca.safety_margin", self.orca.safety_margin),
        ];
        if let Some((name, v)) = non_negative.iter().find(|(_, v)| !(v.is_finite() && *v >= T::zero())) {
            return Err(Error::Config(format!("world.{name} must be finite and >= 0, got {v}")));
        }
        if self.time_limit <= self.dt {
            return Err(Error::Config(format!(
                "world.time_limit ({}) must exceed dt ({})",
                self.time_limit, self.dt
            )));
        }
        if self.fov_deg > T::lit(360.0) {
            return Err(Error::Config(format!("world.fov_deg must be <= 360, got {}", self.fov_deg)));
        }
        for (name, [lo, hi]) in [
            ("human_radius_range", self.human_radius_range),
            ("human_vmax_range", self.human_vmax_range),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo > T::zero() && lo <= hi) {
                return Err(Error::Config(format!(
                    "world.{name} must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
                )));
            }
        }
        if !(self.goal_change_prob >= T::zero() && self.goal_change_prob <= T::one()) {
            return Err(Error::Config(format!(
                "world.goal_change_prob must lie in [0, 1], got {}",
                self.goal_change_prob
            )));
        }
        if self.orca.max_neighbors == 0 {
            return Err(Error::Config("world.orca.max_neighbors must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of steps after which an unfinished episode times out.
    pub fn max_steps(&self) -> usize {
        let steps = (self.time_limit / self.dt).to_f64_lossy();
        (steps - 1e-9).ceil().max(1.0) as usize
    }

    pub fn half_arena(&self) -> T {
        self.arena_size / T::lit(2.0)
    }
}
