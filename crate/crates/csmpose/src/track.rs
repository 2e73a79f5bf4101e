//! `track`: follows the model through a numbered frame sequence.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use csmpose_core::flow::FlowField;
use csmpose_core::search::{FrameResult, Tracker};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::exec::Threads;
use crate::frames::{frame_stem, parse_range, FramePattern};
use crate::image_io::{read_rgb, write_labels};
use crate::model_file::load_model;
use crate::run_dir::{write_json, FrameEntry, Manifest, SkeletonDoc, MANIFEST, RUN_FORMAT, RUN_VERSION, SCORES};

/// Magic bytes opening a flow dump.
pub const FLOW_MAGIC: &[u8; 8] = b"CSMFLOW1";

#[derive(Debug, Clone)]
pub struct TrackArgs {
    pub model: PathBuf,
    pub frames: String,
    pub range: String,
    pub out: PathBuf,
    /// Replaces the model's tracking, asymmetry and fps settings. The schema
    /// and cloud shape always come from the model.
    pub config: Option<PathBuf>,
    pub dump_flow: bool,
    pub timing: bool,
}

#[derive(Debug, Clone)]
pub struct TrackReport {
    pub frames: usize,
    pub divergences: usize,
    pub seconds: Vec<f64>,
}

/// Flow as `CSMFLOW1`, width and height (u32 LE), then `(u, v)` f32 LE pairs
/// in row-major order.
pub fn encode_flow(flow: &FlowField) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + flow.len() * 8);
    out.extend_from_slice(FLOW_MAGIC);
    out.extend_from_slice(&(flow.width() as u32).to_le_bytes());
    out.extend_from_slice(&(flow.height() as u32).to_le_bytes());
    for v in flow.values() {
        out.extend_from_slice(&(v.x as f32).to_le_bytes());
        out.extend_from_slice(&(v.y as f32).to_le_bytes());
    }
    out
}

fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::at(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::at(path, e))
}

pub fn run_track(args: &TrackArgs) -> CliResult<TrackReport> {
    let pattern = FramePattern::parse(&args.frames)?;
    let indices = parse_range(&args.range)?;
    let exec = Threads::from_env()?;
    let stored = load_model(&args.model)?;
    let config = match &args.config {
        Some(p) => RunConfig { schema: stored.config.schema.clone(), cloud: stored.config.cloud, ..RunConfig::load(p)? },
        None => stored.config.clone(),
    };
    let parts: Vec<String> = stored.model.nodes().iter().map(|n| n.name.clone()).collect();
    let mut tracker =
        Tracker::with_references(stored.model, stored.references, &stored.frame, stored.mask, config.tracker.clone())?;

    let mut scores = String::from("frame,diverged");
    for p in &parts {
        let _ = write!(scores, ",score_{p}");
    }
    scores.push_str(",evaluations,budget_exhausted\n");
    let mut entries = Vec::new();
    let mut seconds = Vec::new();
    for (k, &index) in indices.iter().enumerate() {
        let path = pattern.path(index);
        let frame = read_rgb(&path)?;
        if !frame.same_size(&stored.frame) {
            return Err(CliError::at(&path, "frame size differs from the model's reference frame"));
        }
        let start = Instant::now();
        let result: FrameResult = if k == 0 && frame == stored.frame {
            tracker.initial_result(&frame)?
        } else {
            tracker.step(&exec, &frame)?
        };
        let elapsed = start.elapsed().as_secs_f64();
        seconds.push(elapsed);

        let stem = frame_stem(index);
        let (mask, skeleton) = (format!("masks/{stem}.png"), format!("skeletons/{stem}.json"));
        write_labels(&args.out.join(&mask), &result.labels)?;
        write_json(
            &args.out.join(&skeleton),
            &SkeletonDoc { frame: index, diverged: result.diverged, skeleton: result.skeleton.clone() },
        )?;
        if let (true, Some(flow)) = (args.dump_flow, &result.flow) {
            write_bytes(&args.out.join(format!("flow/{stem}.flow")), &encode_flow(flow))?;
        }
        let evaluations = result.groups.iter().map(|g| g.evaluations).sum();
        let budget_exhausted = result.groups.iter().any(|g| g.budget_exhausted);
        let _ = write!(scores, "{index},{}", result.diverged);
        for s in &result.scores {
            let _ = write!(scores, ",{s:.6}");
        }
        let _ = writeln!(scores, ",{evaluations},{budget_exhausted}");
        entries.push(FrameEntry {
            frame: index,
            image: path.to_string_lossy().into_owned(),
            mask,
            skeleton,
            diverged: result.diverged,
            lost: parts.iter().zip(&result.lost).filter(|(_, &l)| l).map(|(p, _)| p.clone()).collect(),
            evaluations,
            budget_exhausted,
            seconds: args.timing.then_some(elapsed),
        });
    }
    write_bytes(&args.out.join(SCORES), scores.as_bytes())?;
    let divergences = entries.iter().filter(|e| e.diverged).count();
    let manifest = Manifest {
        format: RUN_FORMAT.into(),
        version: RUN_VERSION,
        frame_pattern: args.frames.clone(),
        frame_count: entries.len(),
        divergences,
        parts,
        frames: entries,
        config,
    };
    write_json(&args.out.join(MANIFEST), &manifest)?;
    Ok(TrackReport { frames: manifest.frame_count, divergences, seconds })
}
