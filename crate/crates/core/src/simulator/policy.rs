use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::scalar::Scalar;
use crate::simulator::{Kinematics, Observation};

/// A robot command. The variant must match the world's kinematics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", rename_all = "snake_case")]
pub enum Action<T> {
    Velocity(Vec2<T>),
    Unicycle { speed: T, turn_rate: T },
}

impl<T: Scalar> Action<T> {
    pub fn zero(kinematics: Kinematics) -> Self {
        match kinematics {
            Kinematics::Holonomic => Action::Velocity(Vec2::zero()),
            Kinematics::Unicycle => Action::Unicycle {
                speed: T::zero(),
                turn_rate: T::zero(),
            },
        }
    }

    /// Command that best realizes a desired planar velocity. For a unicycle
    /// the robot turns toward the velocity within one step and moves at the
    /// speed projected on its new heading.
    pub fn toward_velocity(desired: Vec2<T>, kinematics: Kinematics, heading: T, dt: T) -> Self {
        match kinematics {
            Kinematics::Holonomic => Action::Velocity(desired),
            Kinematics::Unicycle => {
                if desired.norm_sq() == T::zero() {
                    return Self::zero(kinematics);
                }
                let target = desired.y.atan2(desired.x);
                let mut delta = target - heading;
                let pi = T::PI();
                let two_pi = pi + pi;
                while delta > pi {
                    delta = delta - two_pi;
                }
                while delta < -pi {
                    delta = delta + two_pi;
                }
                Action::Unicycle {
                    speed: desired.norm() * delta.cos().max(T::zero()),
                    turn_rate: delta / dt,
                }
            }
        }
    }
}

/// Anything that maps observations to actions.
pub trait Policy<T: Scalar> {
    /// Called before the first action of every episode.
    fn reset(&mut self) {}

    fn act(&mut self, obs: &Observation<T>) -> Action<T>;
}

impl<T: Scalar, P: Policy<T> + ?Sized> Policy<T> for Box<P> {
    fn reset(&mut self) {
        (**self).reset()
    }

    fn act(&mut self, obs: &Observation<T>) -> Action<T> {
        (**self).act(obs)
    }
}

/// Drives straight at the goal at full speed, ignoring humans.
#[derive(Clone, Copy, Debug, Default)]
pub struct GoToGoal;

impl<T: Scalar> Policy<T> for GoToGoal {
    fn act(&mut self, obs: &Observation<T>) -> Action<T> {
        let desired = obs.robot.preferred_velocity(obs.dt);
        Action::toward_velocity(desired, obs.kinematics, obs.robot.heading, obs.dt)
    }
}

/// Never moves.
#[derive(Clone, Copy, Debug, Default)]
pub struct Stationary;

impl<T: Scalar> Policy<T> for Stationary {
    fn act(&mut self, obs: &Observation<T>) -> Action<T> {
        Action::zero(obs.kinematics)
    }
}

/// Replays a fixed action list, then stands still.
#[derive(Clone, Debug)]
pub struct ActionSequence<T> {
    actions: Vec<Action<T>>,
    cursor: usize,
}

impl<T: Scalar> ActionSequence<T> {
    pub fn new(actions: Vec<Action<T>>) -> Self {
        Self { actions, cursor: 0 }
    }
}

impl<T: Scalar> Policy<T> for ActionSequence<T> {
    fn reset(&mut self) {
        self.cursor = 0;
    }

    fn act(&mut self, obs: &Observation<T>) -> Action<T> {
        let action = self
            .actions
            .get(self.cursor)
            .copied()
            .unwrap_or_else(|| Action::zero(obs.kinematics));
        self.cursor += 1;
        action
    }
}
