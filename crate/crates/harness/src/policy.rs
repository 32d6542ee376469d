use std::fs;
use std::path::Path;

use crowdnav_core::learner::{ParametricPolicy, POLICY_PARAMS};
use crowdnav_core::simulator::{Action, GoToGoal, Observation, Policy, Stationary};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, PolicySource, ScriptedPolicy};
use crate::error::{HarnessError, Result};

/// Tag of files written by [`PolicyFile::to_json`].
pub const POLICY_FORMAT: &str = "crowdnav-policy/1";

/// Robot controller resolved from a [`PolicySource`].
#[derive(Clone, Debug)]
pub enum RobotPolicy {
    GoToGoal,
    Stationary,
    Parametric(ParametricPolicy<f64>),
}

impl Policy<f64> for RobotPolicy {
    fn act(&mut self, obs: &Observation<f64>) -> Action<f64> {
        match self {
            RobotPolicy::GoToGoal => GoToGoal.act(obs),
            RobotPolicy::Stationary => Stationary.act(obs),
            RobotPolicy::Parametric(p) => p.act(obs),
        }
    }
}

impl RobotPolicy {
    pub fn resolve(cfg: &ExperimentConfig) -> Result<Self> {
        match &cfg.policy {
            PolicySource::Scripted { name: ScriptedPolicy::GoToGoal } => Ok(RobotPolicy::GoToGoal),
            PolicySource::Scripted { name: ScriptedPolicy::Stationary } => Ok(RobotPolicy::Stationary),
            PolicySource::Parametric { params } => Ok(RobotPolicy::Parametric(ParametricPolicy::new(*params)?)),
            PolicySource::Learned { path } => {
                let file = PolicyFile::load(&cfg.resolve(path))?;
                Ok(RobotPolicy::Parametric(ParametricPolicy::new(file.params)?))
            }
        }
    }
}

/// A learned policy plus the run that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub format: String,
    pub seed_base: u64,
    pub config: serde_json::Value,
    pub params: [f64; POLICY_PARAMS],
}

impl PolicyFile {
    pub fn new(cfg: &ExperimentConfig, policy: &ParametricPolicy<f64>) -> Self {
        Self {
            format: POLICY_FORMAT.into(),
            seed_base: cfg.seed_base,
            config: serde_json::to_value(cfg).expect("config serializes"),
            params: policy.params,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("policy serializes") + "\n"
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let file: Self = serde_json::from_str(&text).map_err(|e| HarnessError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if file.format != POLICY_FORMAT {
            return Err(HarnessError::Config {
                path: path.to_path_buf(),
                message: format!("format: expected {POLICY_FORMAT:?}, found {:?}", file.format),
            });
        }
        Ok(file)
    }
}
