//! Episode engine: scenario sampling, synchronous stepping of robot and
//! humans, sensing, termination and seeded replay.

mod config;
mod observation;
mod policy;
mod record;

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{Kinematics, WorldConfig};
pub use observation::{HumanObservation, Observation, ObservationLayout, OBSERVATION_LAYOUT_VERSION};
pub use policy::{Action, ActionSequence, GoToGoal, Policy, Stationary};
pub use record::{EpisodeRecord, StepRecord, RECORD_FORMAT};

use crate::agent::AgentState;
use crate::crowd::{sample_goal, sample_point, sample_range, Crowd};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::predictors::{const_vel_predict, ground_truth_predict, PredictorKind, TrajectoryPrediction};
use crate::rewards::{total_reward, PredictionOccupancy, RewardBreakdown, RewardConfig, StepSummary};
use crate::scalar::Scalar;

/// Draws per agent before sampling reports an overcrowded configuration.
const SPAWN_ATTEMPTS: usize = 1000;
/// Random stream for the human subsystem; stream 0 samples the scenario.
const CROWD_STREAM: u64 = 1;

/// How an episode ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Collision,
    Timeout,
}

impl Outcome {
    /// Goal or collision: the episode ended inside the task.
    pub fn is_terminated(self) -> bool {
        matches!(self, Outcome::Success | Outcome::Collision)
    }

    /// Time limit hit.
    pub fn is_truncated(self) -> bool {
        self == Outcome::Timeout
    }
}

/// Diagnostics for one step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepInfo<T> {
    pub d_min: Option<T>,
    pub in_danger_zone: bool,
    pub d_goal: T,
    /// The action after speed clamping.
    pub applied_action: Action<T>,
    pub action_clamped: bool,
    pub occupancy: Option<PredictionOccupancy>,
}

/// Result of [`Simulator::step`].
#[derive(Clone, Debug, PartialEq)]
pub struct Step<T> {
    pub observation: Observation<T>,
    pub reward: RewardBreakdown<T>,
    pub outcome: Option<Outcome>,
    pub info: StepInfo<T>,
}

/// One live episode.
#[derive(Clone, Debug)]
pub struct Simulator<T> {
    config: WorldConfig<T>,
    reward: RewardConfig<T>,
    predictor: PredictorKind,
    seed: u64,
    robot: AgentState<T>,
    crowd: Crowd<T>,
    history: Vec<VecDeque<Vec2<T>>>,
    steps: usize,
    outcome: Option<Outcome>,
    prediction: Option<TrajectoryPrediction<T>>,
}

impl<T: Scalar> Simulator<T> {
    /// Samples a fresh episode from `config` with the given seed.
    pub fn reset(
        config: &WorldConfig<T>,
        reward: &RewardConfig<T>,
        predictor: PredictorKind,
        seed: u64,
    ) -> Result<(Self, Observation<T>)> {
        config.validate()?;
        reward.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (robot, humans) = sample_scenario(config, &mut rng)?;
        Self::assemble(config, reward, predictor, seed, robot, humans)
    }

    /// Starts an episode from explicit agent states.
    pub fn from_states(
        config: &WorldConfig<T>,
        reward: &RewardConfig<T>,
        predictor: PredictorKind,
        seed: u64,
        robot: AgentState<T>,
        humans: Vec<AgentState<T>>,
    ) -> Result<(Self, Observation<T>)> {
        config.validate()?;
        reward.validate()?;
        if let Some(bad) = std::iter::once(&robot).chain(&humans).find(|a| !a.is_finite() || a.radius <= T::zero()) {
            return Err(Error::Config(format!("agent state must be finite with radius > 0: {bad:?}")));
        }
        Self::assemble(config, reward, predictor, seed, robot, humans)
    }

    fn assemble(
        config: &WorldConfig<T>,
        reward: &RewardConfig<T>,
        predictor: PredictorKind,
        seed: u64,
        robot: AgentState<T>,
        humans: Vec<AgentState<T>>,
    ) -> Result<(Self, Observation<T>)> {
        let mut crowd_rng = ChaCha8Rng::seed_from_u64(seed);
        crowd_rng.set_stream(CROWD_STREAM);
        let n = humans.len();
        let mut sim = Self {
            config: config.clone(),
            reward: reward.clone(),
            predictor,
            seed,
            robot,
            crowd: Crowd::new(humans, config, crowd_rng),
            history: vec![VecDeque::with_capacity(config.memory); n],
            steps: 0,
            outcome: None,
            prediction: None,
        };
        sim.prediction = sim.predict();
        let obs = sim.observe();
        Ok((sim, obs))
    }

    pub fn config(&self) -> &WorldConfig<T> {
        &self.config
    }

    pub fn reward_config(&self) -> &RewardConfig<T> {
        &self.reward
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn robot(&self) -> &AgentState<T> {
        &self.robot
    }

    pub fn humans(&self) -> &[AgentState<T>] {
        self.crowd.humans()
    }

    /// The human subsystem, e.g. for cloned rollouts.
    pub fn crowd(&self) -> &Crowd<T> {
        &self.crowd
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    /// Ids of humans inside the sensor range and field of view.
    pub fn visible_ids(&self) -> Vec<usize> {
        let half_fov = (self.config.fov_deg / T::lit(2.0)).to_radians();
        let full_circle = self.config.fov_deg >= T::lit(360.0);
        self.humans()
            .iter()
            .enumerate()
            .filter(|(_, h)| {
                let offset = h.position - self.robot.position;
                if offset.norm() > self.config.sensor_range {
                    return false;
                }
                if full_circle {
                    return true;
                }
                let bearing = offset.y.atan2(offset.x) - self.robot.heading;
                let wrapped = bearing.sin().atan2(bearing.cos());
                wrapped.abs() <= half_fov
            })
            .map(|(i, _)| i)
            .collect()
    }

    fn predict(&self) -> Option<TrajectoryPrediction<T>> {
        let horizon = self.reward.horizon;
        match self.predictor {
            PredictorKind::None => None,
            PredictorKind::ConstVel => {
                let humans = self.humans();
                let visible = self.visible_ids();
                Some(const_vel_predict(
                    visible.iter().map(|&i| (i, &humans[i])),
                    horizon,
                    self.config.dt,
                ))
            }
            PredictorKind::GroundTruth => Some(ground_truth_predict(&self.crowd, &self.visible_ids(), horizon)),
        }
    }

    pub fn observe(&self) -> Observation<T> {
        let visible_ids = self.visible_ids();
        let mut visible = vec![false; self.crowd.len()];
        let humans = visible_ids
            .iter()
            .map(|&id| {
                visible[id] = true;
                HumanObservation {
                    id,
                    position: self.humans()[id].position,
                    past: self.history[id].iter().copied().collect(),
                }
            })
            .collect();
        Observation {
            step: self.steps,
            dt: self.config.dt,
            kinematics: self.config.kinematics,
            robot: self.robot,
            humans,
            visible,
            prediction: self.prediction.clone(),
        }
    }

    /// Surface distance from the robot to the nearest human.
    pub fn d_min(&self) -> Option<T> {
        nearest_surface_distance(&self.robot, self.humans())
    }

    fn clamp_action(&self, action: Action<T>) -> Result<(Action<T>, bool)> {
        let v_max = self.robot.v_max;
        match (action, self.config.kinematics) {
            (Action::Velocity(v), Kinematics::Holonomic) => {
                if !v.is_finite() {
                    return Err(Error::Usage(format!("non-finite action {v:?}")));
                }
                let clamped = v.norm() > v_max;
                Ok((Action::Velocity(v.clamp_norm(v_max)), clamped))
            }
            (Action::Unicycle { speed, turn_rate }, Kinematics::Unicycle) => {
                if !(speed.is_finite() && turn_rate.is_finite()) {
                    return Err(Error::Usage(format!("non-finite action ({speed}, {turn_rate})")));
                }
                let clamped = speed.abs() > v_max;
                Ok((
                    Action::Unicycle {
                        speed: speed.max(-v_max).min(v_max),
                        turn_rate,
                    },
                    clamped,
                ))
            }
            (a, k) => Err(Error::Usage(format!("action {a:?} does not match {k:?} kinematics"))),
        }
    }

    /// Advances the world one step: human policies on the pre-step snapshot,
    /// integration of everyone, termination checks (goal, collision, timeout),
    /// then the reward.
    pub fn step(&mut self, action: Action<T>) -> Result<Step<T>> {
        if let Some(outcome) = self.outcome {
            return Err(Error::Usage(format!("step called after the episode ended ({outcome:?})")));
        }
        let (applied, action_clamped) = self.clamp_action(action)?;
        let dt = self.config.dt;
        let d_goal_prev = self.robot.distance_to_goal();

        for (buffer, human) in self.history.iter_mut().zip(self.crowd.humans()) {
            if self.config.memory == 0 {
                break;
            }
            if buffer.len() == self.config.memory {
                buffer.pop_front();
            }
            buffer.push_back(human.position);
        }
        self.crowd.step();
        integrate_robot(&mut self.robot, applied, dt);
        self.steps += 1;

        let d_goal = self.robot.distance_to_goal();
        let d_min = self.d_min();
        let reached_goal = d_goal <= self.config.goal_tolerance;
        let collided = d_min.is_some_and(|d| d <= T::zero());
        let timed_out = self.steps >= self.config.max_steps();
        self.outcome = if reached_goal {
            Some(Outcome::Success)
        } else if collided {
            Some(Outcome::Collision)
        } else if timed_out {
            Some(Outcome::Timeout)
        } else {
            None
        };

        self.prediction = self.predict();
        let occupancy = self
            .prediction
            .as_ref()
            .map(|p| p.occupancy(&self.robot, self.crowd.humans()));
        let d_min_value = d_min.unwrap_or_else(T::infinity);
        let reward = total_reward(
            &StepSummary {
                reached_goal,
                collided,
                d_min: d_min_value,
                d_goal_prev,
                d_goal_curr: d_goal,
                occupancy: occupancy.as_ref(),
            },
            &self.reward,
        );

        Ok(Step {
            observation: self.observe(),
            reward,
            outcome: self.outcome,
            info: StepInfo {
                d_min,
                in_danger_zone: self.reward.in_danger_zone(d_min_value),
                d_goal,
                applied_action: applied,
                action_clamped,
                occupancy,
            },
        })
    }
}

/// Applies one step of the robot's kinematics.
fn integrate_robot<T: Scalar>(robot: &mut AgentState<T>, action: Action<T>, dt: T) {
    match action {
        Action::Velocity(v) => {
            robot.velocity = v;
            robot.position += v * dt;
            if v.norm_sq() > T::zero() {
                robot.heading = v.y.atan2(v.x);
            }
        }
        Action::Unicycle { speed, turn_rate } => {
            robot.heading = robot.heading + turn_rate * dt;
            robot.velocity = Vec2::from_angle(robot.heading) * speed;
            robot.position += robot.velocity * dt;
        }
    }
}

pub(crate) fn nearest_surface_distance<T: Scalar>(robot: &AgentState<T>, humans: &[AgentState<T>]) -> Option<T> {
    humans
        .iter()
        .map(|h| robot.surface_distance(h))
        .reduce(T::min)
}

fn sample_scenario<T: Scalar>(config: &WorldConfig<T>, rng: &mut ChaCha8Rng) -> Result<(AgentState<T>, Vec<AgentState<T>>)> {
    let half = config.half_arena();
    let overcrowded = |what: &str| {
        Error::Config(format!(
            "could not place {what} after {SPAWN_ATTEMPTS} attempts; arena too crowded or separation too large"
        ))
    };

    let robot_start = sample_point(rng, half, config.robot_radius);
    let robot_goal = (0..SPAWN_ATTEMPTS / 100)
        .find_map(|_| sample_goal(rng, robot_start, half, config.robot_radius, config.min_start_goal_separation))
        .ok_or_else(|| overcrowded("the robot goal"))?;
    let robot = AgentState::at_rest(robot_start, robot_goal, config.robot_radius, config.robot_v_max);

    let mut humans: Vec<AgentState<T>> = Vec::with_capacity(config.n_humans);
    for i in 0..config.n_humans {
        let radius = sample_range(rng, config.human_radius_range);
        let v_max = sample_range(rng, config.human_vmax_range);
        let start = (0..SPAWN_ATTEMPTS)
            .map(|_| sample_point(rng, half, radius))
            .find(|&p| {
                let clear = |other: &AgentState<T>| p.distance(other.position) - radius - other.radius >= config.spawn_clearance;
                clear(&robot) && humans.iter().all(clear)
            })
            .ok_or_else(|| overcrowded(&format!("human {i}")))?;
        let goal = (0..SPAWN_ATTEMPTS / 100)
            .find_map(|_| sample_goal(rng, start, half, radius, config.min_start_goal_separation))
            .ok_or_else(|| overcrowded(&format!("the goal of human {i}")))?;
        humans.push(AgentState::at_rest(start, goal, radius, v_max));
    }
    Ok((robot, humans))
}

/// Runs one seeded episode to completion.
pub fn run_episode<T: Scalar, P: Policy<T> + ?Sized>(
    config: &WorldConfig<T>,
    reward: &RewardConfig<T>,
    predictor: PredictorKind,
    policy: &mut P,
    seed: u64,
) -> Result<EpisodeRecord<T>> {
    let (sim, obs) = Simulator::reset(config, reward, predictor, seed)?;
    drive(sim, obs, policy)
}

/// Drives an already-initialized simulator to the end of its episode.
pub fn drive<T: Scalar, P: Policy<T> + ?Sized>(
    mut sim: Simulator<T>,
    mut obs: Observation<T>,
    policy: &mut P,
) -> Result<EpisodeRecord<T>> {
    policy.reset();
    let initial_robot = *sim.robot();
    let initial_humans = sim.humans().to_vec();
    let mut steps = Vec::with_capacity(sim.config().max_steps());
    let outcome = loop {
        let action = policy.act(&obs);
        let step = sim.step(action)?;
        steps.push(StepRecord {
            step: sim.steps_taken(),
            time: sim.config().dt * T::lit(sim.steps_taken() as f64),
            action: step.info.applied_action,
            action_clamped: step.info.action_clamped,
            robot: *sim.robot(),
            humans: sim.humans().to_vec(),
            reward: step.reward,
            d_min: step.info.d_min,
            in_danger_zone: step.info.in_danger_zone,
            d_goal: step.info.d_goal,
            outcome: step.outcome,
        });
        obs = step.observation;
        if let Some(outcome) = step.outcome {
            break outcome;
        }
    };
    Ok(EpisodeRecord {
        seed: sim.seed(),
        dt: sim.config().dt,
        d_disc: sim.reward_config().d_disc,
        kinematics: sim.config().kinematics,
        initial_robot,
        initial_humans,
        outcome,
        steps,
    })
}

/// Runs one episode per seed in parallel; results come back in seed order.
pub fn run_batch<T, P, F>(
    config: &WorldConfig<T>,
    reward: &RewardConfig<T>,
    predictor: PredictorKind,
    make_policy: F,
    seeds: &[u64],
) -> Result<Vec<EpisodeRecord<T>>>
where
    T: Scalar,
    P: Policy<T>,
    F: Fn() -> P + Sync,
{
    seeds
        .par_iter()
        .map(|&seed| run_episode(config, reward, predictor, &mut make_policy(), seed))
        .collect()
}
