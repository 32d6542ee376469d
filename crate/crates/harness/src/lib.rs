//! Batch experiments on top of `crowdnav-core`: TOML configs, seeded
//! evaluation campaigns, learning curves and reward-surface grids.

pub mod config;
pub mod error;
pub mod policy;
pub mod run;
pub mod surface;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
