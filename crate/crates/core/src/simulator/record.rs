use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::agent::AgentState;
use crate::geometry::Vec2;
use crate::rewards::RewardBreakdown;
use crate::scalar::Scalar;
use crate::simulator::{Action, Kinematics, Outcome};

/// Format tag written in the first line of every record file.
pub const RECORD_FORMAT: &str = "crowdnav-episode/1";

/// Log of one step, taken after the step was applied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct StepRecord<T> {
    /// Number of steps taken so far, starting at 1.
    pub step: usize,
    pub time: T,
    pub action: Action<T>,
    pub action_clamped: bool,
    pub robot: AgentState<T>,
    pub humans: Vec<AgentState<T>>,
    pub reward: RewardBreakdown<T>,
    /// Surface distance to the nearest human; absent without humans.
    pub d_min: Option<T>,
    pub in_danger_zone: bool,
    pub d_goal: T,
    pub outcome: Option<Outcome>,
}

/// Everything that happened in one episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EpisodeRecord<T> {
    pub seed: u64,
    pub dt: T,
    pub d_disc: T,
    pub kinematics: Kinematics,
    pub initial_robot: AgentState<T>,
    pub initial_humans: Vec<AgentState<T>>,
    pub outcome: Outcome,
    pub steps: Vec<StepRecord<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct Header<T> {
    format: String,
    seed: u64,
    dt: T,
    d_disc: T,
    kinematics: Kinematics,
    outcome: Outcome,
    steps: usize,
    initial_robot: AgentState<T>,
    initial_humans: Vec<AgentState<T>>,
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

impl<T: Scalar> EpisodeRecord<T> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Elapsed simulated time.
    pub fn duration(&self) -> T {
        self.dt * T::lit(self.steps.len() as f64)
    }

    /// Robot centers from the initial state through the last step.
    pub fn robot_positions(&self) -> impl Iterator<Item = Vec2<T>> + '_ {
        std::iter::once(self.initial_robot.position).chain(self.steps.iter().map(|s| s.robot.position))
    }

    /// Sum of per-step robot displacement magnitudes.
    pub fn path_length(&self) -> T {
        let positions: Vec<_> = self.robot_positions().collect();
        positions
            .windows(2)
            .fold(T::zero(), |acc, w| acc + w[1].distance(w[0]))
    }

    pub fn straight_line_distance(&self) -> T {
        self.initial_robot.position.distance(self.initial_robot.goal)
    }

    pub fn cumulative_reward(&self) -> T {
        self.steps.iter().fold(T::zero(), |acc, s| acc + s.reward.total)
    }

    pub fn discounted_return(&self, gamma: T) -> T {
        self.steps
            .iter()
            .rev()
            .fold(T::zero(), |acc, s| s.reward.total + gamma * acc)
    }

    /// Writes a header line, then one JSON object per step.
    ///
    /// Header fields, in order: `format, seed, dt, d_disc, kinematics, outcome,
    /// steps, initial_robot, initial_humans`. Step fields, in order: `step,
    /// time, action, action_clamped, robot, humans, reward, d_min,
    /// in_danger_zone, d_goal, outcome`.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header = Header {
            format: RECORD_FORMAT.to_string(),
            seed: self.seed,
            dt: self.dt,
            d_disc: self.d_disc,
            kinematics: self.kinematics,
            outcome: self.outcome,
            steps: self.steps.len(),
            initial_robot: self.initial_robot,
            initial_humans: self.initial_humans.clone(),
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for step in &self.steps {
            serde_json::to_writer(&mut w, step)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> io::Result<Self> {
        let mut lines = r.lines();
        let first = lines.next().ok_or_else(|| invalid("empty episode record"))??;
        let header: Header<T> = serde_json::from_str(&first).map_err(|e| invalid(format!("header: {e}")))?;
        if header.format != RECORD_FORMAT {
            return Err(invalid(format!(
                "unsupported record format {:?}, expected {RECORD_FORMAT:?}",
                header.format
            )));
        }
        let mut steps = Vec::with_capacity(header.steps);
        for (n, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let step: StepRecord<T> =
                serde_json::from_str(&line).map_err(|e| invalid(format!("step line {}: {e}", n + 2)))?;
            steps.push(step);
        }
        if steps.len() != header.steps {
            return Err(invalid(format!(
                "header announces {} steps, found {}",
                header.steps,
                steps.len()
            )));
        }
        Ok(Self {
            seed: header.seed,
            dt: header.dt,
            d_disc: header.d_disc,
            kinematics: header.kinematics,
            initial_robot: header.initial_robot,
            initial_humans: header.initial_humans,
            outcome: header.outcome,
            steps,
        })
    }
}
