use std::fs;
use std::path::Path;

use qisc_core::dataset::DatasetConfig;
use qisc_core::{Error, Result, TrainConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    /// A pipeline has converged once its mean train loss drops below this.
    pub threshold: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig { threshold: 0.1 }
    }
}

/// Contents of the `--config` TOML file. Every section and key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetConfig,
    pub train: TrainConfig,
    pub compare: CompareConfig,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}
