//! `init`: relational model from one frame and its label mask.

use std::fmt::Write;
use std::path::PathBuf;

use csmpose_core::csm::build_model;
use csmpose_core::imgcore::BACKGROUND;
use csmpose_core::math::to_degrees;
use csmpose_core::search::reference_histograms;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::image_io::{read_labels, read_rgb};
use crate::model_file::{save_model, StoredModel};

#[derive(Debug, Clone)]
pub struct InitArgs {
    pub frame: PathBuf,
    pub mask: PathBuf,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct InitReport {
    pub nodes: usize,
    pub edges: usize,
    /// Human-readable joint table.
    pub table: String,
}

pub fn run_init(args: &InitArgs) -> CliResult<InitReport> {
    let config = RunConfig::load_or_default(args.config.as_deref())?;
    let frame = read_rgb(&args.frame)?;
    let mask = read_labels(&args.mask)?;
    if !frame.same_size(&mask) {
        return Err(CliError::data(format!(
            "frame is {}x{} but mask is {}x{}",
            frame.width(),
            frame.height(),
            mask.width(),
            mask.height()
        )));
    }
    let model = build_model(&mask, &config.schema, config.cloud).map_err(|e| CliError::at(&args.mask, e))?;
    let mask = mask.map(|&l| if model.by_label(l).is_some() { l } else { BACKGROUND });
    let references = reference_histograms(&model, &frame, &mask, config.tracker.bins)?;

    let mut table = format!("{:<18} {:>5} {:<16} {:<16} {:>8} {:>8} {:>9}\n", "part", "label", "parent", "joint", "x", "y", "angle");
    for node in model.nodes() {
        let parent = node.parent.map_or("-", |p| model.node(p).name.as_str());
        let (x, y) = node.joint.map_or((f64::NAN, f64::NAN), |j| (j.x, j.y));
        let _ = writeln!(
            table,
            "{:<18} {:>5} {:<16} {:<16} {:>8.2} {:>8.2} {:>9.2}",
            node.name,
            node.label,
            parent,
            node.joint_name.as_deref().unwrap_or("-"),
            x,
            y,
            to_degrees(node.angle)
        );
    }
    let report = InitReport { nodes: model.len(), edges: model.len() - 1, table };
    save_model(&args.out, &StoredModel { model, references, config, frame, mask })?;
    Ok(report)
}
