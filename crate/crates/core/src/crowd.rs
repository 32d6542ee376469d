//! The human subsystem: every pedestrian's state, its reactive policy and the
//! random stream that drives goal changes. It never reads the robot, so a clone
//! rolled forward reproduces the humans' future exactly.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::agent::AgentState;
use crate::crowd_policies::{orca_velocity, social_force_velocity, HumanPolicy, OrcaParams, SocialForceParams};
use crate::geometry::Vec2;
use crate::scalar::Scalar;
use crate::simulator::WorldConfig;

/// Attempts before goal resampling gives up on the separation requirement.
const GOAL_ATTEMPTS: usize = 100;

#[derive(Clone, Debug)]
pub struct Crowd<T> {
    humans: Vec<AgentState<T>>,
    policy: HumanPolicy,
    orca: OrcaParams<T>,
    social_force: SocialForceParams<T>,
    dt: T,
    half_arena: T,
    goal_change_prob: f64,
    min_goal_separation: T,
    rng: ChaCha8Rng,
}

/// Uniform point in the square `[-half + margin, half - margin]^2`.
pub(crate) fn sample_point<T: Scalar>(rng: &mut ChaCha8Rng, half: T, margin: T) -> Vec2<T> {
    let extent = (half - margin).max(T::zero()).to_f64_lossy();
    let x = rng.random_range(-extent..=extent);
    let y = rng.random_range(-extent..=extent);
    Vec2::new(T::lit(x), T::lit(y))
}

/// Uniform sample from `[lo, hi]`.
pub(crate) fn sample_range<T: Scalar>(rng: &mut ChaCha8Rng, [lo, hi]: [T; 2]) -> T {
    T::lit(rng.random_range(lo.to_f64_lossy()..=hi.to_f64_lossy()))
}

/// A goal inside the arena at least `min_sep` from `from`, giving up on the
/// separation after a bounded number of draws.
pub(crate) fn sample_goal<T: Scalar>(
    rng: &mut ChaCha8Rng,
    from: Vec2<T>,
    half: T,
    margin: T,
    min_sep: T,
) -> Option<Vec2<T>> {
    (0..GOAL_ATTEMPTS)
        .map(|_| sample_point(rng, half, margin))
        .find(|g| g.distance(from) >= min_sep)
}

impl<T: Scalar> Crowd<T> {
    pub fn new(humans: Vec<AgentState<T>>, config: &WorldConfig<T>, rng: ChaCha8Rng) -> Self {
        Self {
            humans,
            policy: config.human_policy,
            orca: config.orca.clone(),
            social_force: config.social_force.clone(),
            dt: config.dt,
            half_arena: config.half_arena(),
            goal_change_prob: config.goal_change_prob.to_f64_lossy(),
            min_goal_separation: config.min_start_goal_separation,
            rng,
        }
    }

    pub fn humans(&self) -> &[AgentState<T>] {
        &self.humans
    }

    pub fn len(&self) -> usize {
        self.humans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.humans.is_empty()
    }

    pub fn policy(&self) -> HumanPolicy {
        self.policy
    }

    /// Velocity every human's policy picks against the current snapshot.
    pub fn policy_velocities(&self) -> Vec<Vec2<T>> {
        (0..self.humans.len())
            .map(|i| {
                let me = &self.humans[i];
                let others: Vec<AgentState<T>> = self
                    .humans
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, h)| *h)
                    .collect();
                match self.policy {
                    HumanPolicy::Orca => {
                        orca_velocity(me, &others, me.preferred_velocity(self.dt), &self.orca, self.dt)
                    }
                    HumanPolicy::Sf => {
                        social_force_velocity(me, &others, me.goal, &self.social_force, self.dt)
                    }
                }
            })
            .collect()
    }

    /// Advances every human one step: synchronous policy evaluation, then
    /// integration, then goal bookkeeping in index order.
    pub fn step(&mut self) {
        let velocities = self.policy_velocities();
        for (human, v) in self.humans.iter_mut().zip(velocities) {
            human.velocity = v;
            human.position += v * self.dt;
            if v.norm_sq() > T::zero() {
                human.heading = v.y.atan2(v.x);
            }
        }
        for i in 0..self.humans.len() {
            let human = self.humans[i];
            let arrived = human.distance_to_goal() <= human.radius;
            let change = !arrived
                && self.goal_change_prob > 0.0
                && self.rng.random::<f64>() < self.goal_change_prob;
            if arrived || change {
                if let Some(goal) = sample_goal(
                    &mut self.rng,
                    human.position,
                    self.half_arena,
                    human.radius,
                    self.min_goal_separation,
                ) {
                    self.humans[i].goal = goal;
                }
            }
        }
    }

    /// Smallest surface distance between any two humans.
    pub fn min_pairwise_surface_distance(&self) -> Option<T> {
        let mut best: Option<T> = None;
        for (i, a) in self.humans.iter().enumerate() {
            for b in &self.humans[i + 1..] {
                let d = a.surface_distance(b);
                best = Some(best.map_or(d, |m| m.min(d)));
            }
        }
        best
    }
}
