//! Experiment configuration files (TOML). Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use crowdnav_core::learner::LearnerConfig;
use crowdnav_core::predictors::PredictorKind;
use crowdnav_core::rewards::RewardConfig;
use crowdnav_core::simulator::WorldConfig;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::surface::GridSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptedPolicy {
    GoToGoal,
    Stationary,
}

/// Where the robot's policy comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySource {
    Scripted { name: ScriptedPolicy },
    /// Gains of the potential-field controller, inline.
    Parametric { params: [f64; crowdnav_core::learner::POLICY_PARAMS] },
    /// A policy file written by `crowdnav learn`, relative to the config file.
    Learned { path: PathBuf },
}

impl Default for PolicySource {
    fn default() -> Self {
        PolicySource::Scripted {
            name: ScriptedPolicy::GoToGoal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Row label in results tables.
    pub label: String,
    pub episodes: usize,
    pub seed_base: u64,
    /// Output directory; not embedded in results so outputs are relocatable.
    #[serde(skip_serializing)]
    pub output_dir: PathBuf,
    pub predictor: PredictorKind,
    pub policy: PolicySource,
    pub world: WorldConfig<f64>,
    pub reward: RewardConfig<f64>,
    pub learner: LearnerConfig,
    pub surface: GridSpec,
    /// Directory relative paths in this config resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            label: "experiment".into(),
            episodes: 500,
            seed_base: 0,
            output_dir: PathBuf::from("out"),
            predictor: PredictorKind::None,
            policy: PolicySource::default(),
            world: WorldConfig::default(),
            reward: RewardConfig::default(),
            learner: LearnerConfig::default(),
            surface: GridSpec::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.base_dir = origin.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate().map_err(|e| HarnessError::Config {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn validate(&self) -> crowdnav_core::Result<()> {
        self.world.validate()?;
        self.reward.validate()?;
        self.learner.validate()?;
        self.surface.validate()?;
        if self.episodes == 0 {
            return Err(crowdnav_core::Error::Config("episodes must be >= 1".into()));
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.episodes as u64).map(|i| self.seed_base + i).collect()
    }

    /// Single-line JSON of the resolved config, embedded in every results file.
    pub fn embedded(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Comment lines opening every results file.
pub(crate) fn provenance_header(kind: &str, cfg: &ExperimentConfig) -> String {
    format!(
        "# crowdnav {kind}\n# seed_base: {}\n# config: {}\n",
        cfg.seed_base,
        cfg.embedded()
    )
}
