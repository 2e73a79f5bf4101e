//! Documents written into run directories.

use std::path::Path;

use csmpose_core::csm::Skeleton2D;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const RUN_FORMAT: &str = "csmpose-run";
pub const RUN_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.json";
pub const SCORES: &str = "scores.csv";

/// Pose of one frame, as written to `skeletons/frame_NNNNN.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonDoc {
    pub frame: usize,
    pub diverged: bool,
    pub skeleton: Skeleton2D,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameEntry {
    pub frame: usize,
    pub image: String,
    pub mask: String,
    pub skeleton: String,
    pub diverged: bool,
    /// Parts missing from the propagated labels.
    pub lost: Vec<String>,
    pub evaluations: usize,
    pub budget_exhausted: bool,
    /// Wall-clock seconds, written only when timing is requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub frame_pattern: String,
    pub frame_count: usize,
    pub divergences: usize,
    pub parts: Vec<String>,
    pub frames: Vec<FrameEntry>,
    pub config: RunConfig,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::at(dir, e))?;
    }
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::at(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::at(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::at(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::at(path, e))
}

pub fn read_manifest(run: &Path) -> CliResult<Manifest> {
    let m: Manifest = read_json(&run.join(MANIFEST))?;
    if m.format != RUN_FORMAT || m.version != RUN_VERSION {
        return Err(CliError::at(&run.join(MANIFEST), format!("unsupported run format {} v{}", m.format, m.version)));
    }
    if m.frames.len() != m.frame_count {
        return Err(CliError::at(&run.join(MANIFEST), "frame list does not match frame_count"));
    }
    Ok(m)
}
