//! Versioned model document: geometry and histograms in JSON, clouds as 16-bit
//! PGM files and the reference frame and mask as PNG, all beside the JSON.

use std::path::{Path, PathBuf};

use csmpose_core::csm::{Cloud, CloudParams, EdgeAttr, ModelNode, NodeAttr, RelationalModel};
use csmpose_core::search::Histogram;
use csmpose_core::{Label, Raster, Rgb, Vec2};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::image_io::{read_labels, read_pgm, read_rgb, write_labels, write_pgm16, write_rgb};

pub const MODEL_FORMAT: &str = "csmpose-model";
pub const MODEL_VERSION: u32 = 1;

/// A model with everything the tracker needs to start.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredModel {
    pub model: RelationalModel,
    pub references: Vec<Histogram>,
    pub config: RunConfig,
    pub frame: Raster<Rgb>,
    pub mask: Raster<Label>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    format: String,
    version: u32,
    width: usize,
    height: usize,
    reference_frame: String,
    reference_mask: String,
    nodes: Vec<NodeDoc>,
    limbs: Vec<Vec<usize>>,
    config: RunConfig,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    name: String,
    label: Label,
    parent: Option<usize>,
    joint_name: Option<String>,
    attr: NodeAttr,
    edge: Option<EdgeAttr>,
    angle: f64,
    half_length: f64,
    joint: Option<Vec2>,
    cloud: CloudDoc,
    reference: HistogramDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CloudDoc {
    file: String,
    width: usize,
    height: usize,
    origin: (i64, i64),
    centroid: Vec2,
    angle: f64,
    params: CloudParams,
}

/// Sparse histogram: `(bin, frequency)` pairs of the non-empty bins.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HistogramDoc {
    bins: usize,
    count: usize,
    nonzero: Vec<(usize, f64)>,
}

/// Directory holding a model's side files: `model.json` → `model.files/`.
pub fn side_dir(model_path: &Path) -> PathBuf {
    let stem = model_path.file_stem().map_or_else(|| "model".into(), |s| s.to_string_lossy().into_owned());
    model_path.with_file_name(format!("{stem}.files"))
}

fn quantize(m: f64) -> u16 {
    (m * 65535.0).round() as u16
}

pub fn save_model(path: &Path, stored: &StoredModel) -> CliResult<()> {
    let side = side_dir(path);
    let side_name = side.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let rel = |f: &str| format!("{side_name}/{f}");
    let mut nodes = Vec::new();
    for (node, hist) in stored.model.nodes().iter().zip(&stored.references) {
        let c = &node.cloud;
        let file = format!("clouds/{}.pgm", node.name);
        let values: Vec<u16> = c.membership().iter().map(|&m| quantize(m)).collect();
        write_pgm16(&side.join(&file), c.width(), c.height(), &values)?;
        nodes.push(NodeDoc {
            name: node.name.clone(),
            label: node.label,
            parent: node.parent,
            joint_name: node.joint_name.clone(),
            attr: node.attr,
            edge: node.edge,
            angle: node.angle,
            half_length: node.half_length,
            joint: node.joint,
            cloud: CloudDoc {
                file: rel(&file),
                width: c.width(),
                height: c.height(),
                origin: c.origin(),
                centroid: c.centroid(),
                angle: c.angle(),
                params: c.params(),
            },
            reference: HistogramDoc {
                bins: hist.bins().len(),
                count: hist.count(),
                nonzero: hist.bins().iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(i, &v)| (i, v)).collect(),
            },
        });
    }
    write_rgb(&side.join("reference.png"), &stored.frame)?;
    write_labels(&side.join("mask.png"), &stored.mask)?;
    let doc = ModelDoc {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        width: stored.model.width(),
        height: stored.model.height(),
        reference_frame: rel("reference.png"),
        reference_mask: rel("mask.png"),
        nodes,
        limbs: stored.model.limbs().to_vec(),
        config: stored.config.clone(),
    };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::at(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::at(path, e))
}

pub fn load_model(path: &Path) -> CliResult<StoredModel> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::at(path, e))?;
    let doc: ModelDoc = serde_json::from_str(&text).map_err(|e| CliError::at(path, e))?;
    if doc.format != MODEL_FORMAT || doc.version != MODEL_VERSION {
        return Err(CliError::at(path, format!("unsupported model format {} v{}", doc.format, doc.version)));
    }
    doc.config.validate().map_err(|e| CliError::at(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut nodes = Vec::new();
    let mut references = Vec::new();
    for n in doc.nodes {
        let file = base.join(&n.cloud.file);
        let (w, h, max, values) = read_pgm(&file)?;
        if (w, h) != (n.cloud.width, n.cloud.height) {
            return Err(CliError::at(&file, "cloud size differs from the model document"));
        }
        let membership = values.iter().map(|&v| f64::from(v) / f64::from(max)).collect();
        let c = &n.cloud;
        let cloud = Cloud::from_parts(n.label, w, h, membership, c.origin, c.centroid, c.angle, c.params)?;
        let mut weights = vec![0.0; n.reference.bins];
        for &(i, v) in &n.reference.nonzero {
            *weights.get_mut(i).ok_or_else(|| CliError::at(path, "histogram bin out of range"))? = v;
        }
        references.push(Histogram::from_parts(weights, n.reference.count)?);
        nodes.push(ModelNode {
            name: n.name,
            label: n.label,
            parent: n.parent,
            joint_name: n.joint_name,
            cloud,
            attr: n.attr,
            edge: n.edge,
            angle: n.angle,
            half_length: n.half_length,
            joint: n.joint,
        });
    }
    let model = RelationalModel::new(nodes, doc.limbs, doc.width, doc.height)?;
    let frame = read_rgb(&base.join(&doc.reference_frame))?;
    let mask = read_labels(&base.join(&doc.reference_mask))?;
    if (frame.width(), frame.height()) != (doc.width, doc.height) || !frame.same_size(&mask) {
        return Err(CliError::at(path, "reference frame or mask size differs from the model"));
    }
    Ok(StoredModel { model, references, config: doc.config, frame, mask })
}
