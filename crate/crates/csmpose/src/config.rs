//! The single JSON configuration document shared by all commands.

use std::path::Path;

use csmpose_core::asymmetry::AsymmetryConfig;
use csmpose_core::csm::{CloudParams, PartSchema};
use csmpose_core::search::TrackerConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Every knob of a run. Missing fields take their defaults, and the fully
/// materialized document is echoed into models and run manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema: PartSchema,
    pub cloud: CloudParams,
    pub tracker: TrackerConfig,
    pub asymmetry: AsymmetryConfig,
    /// Frame rate of the input sequence.
    pub fps: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema: PartSchema::default(),
            cloud: CloudParams::default(),
            tracker: TrackerConfig::default(),
            asymmetry: AsymmetryConfig::default(),
            fps: 30.0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        self.schema.validate()?;
        self.cloud.validate()?;
        self.tracker.validate()?;
        self.asymmetry.validate()?;
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return Err(CliError::data("fps must be positive"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::data(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::at(path, e))?;
        Self::from_json(&text).map_err(|e| CliError::at(path, e))
    }

    /// The default configuration, or the one at `path`.
    pub fn load_or_default(path: Option<&Path>) -> CliResult<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}
