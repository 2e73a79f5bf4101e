use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::model::RelationalModel;
use crate::math::{normalize_angle, Frame2, Vec2};
use crate::{Error, Result};

/// Free parameters of one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeParams {
    /// Relative joint angle; for the root, its global orientation.
    pub theta: f64,
    pub s_y: f64,
    pub s_x: f64,
    /// Joint translation in the parent's local frame. Only honoured for
    /// children of the root.
    pub joint_offset: Vec2,
}

/// Full pose: root position plus one [`NodeParams`] per model node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseParams {
    pub translation: Vec2,
    pub nodes: Vec<NodeParams>,
}

impl PoseParams {
    /// The reference-frame pose stored in the model.
    pub fn identity(model: &RelationalModel) -> Self {
        let nodes = model
            .nodes()
            .iter()
            .map(|n| NodeParams {
                theta: n.edge.map_or(n.angle, |e| e.theta),
                s_y: n.attr.s_y,
                s_x: n.attr.s_x,
                joint_offset: Vec2::ZERO,
            })
            .collect();
        PoseParams { translation: model.node(0).attr.c_vec, nodes }
    }
}

/// Image-space placement of one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosedNode {
    pub centroid: Vec2,
    pub angle: f64,
    pub s_y: f64,
    pub s_x: f64,
    /// Joint with the parent; `None` for the root.
    pub joint: Option<Vec2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosedModel {
    pub nodes: Vec<PosedNode>,
}

/// Scales a local vector: `s_y` along the primary axis, `s_x` across it.
fn scaled(v: Vec2, s_y: f64, s_x: f64) -> Vec2 {
    Vec2::new(v.x * s_y, v.y * s_x)
}

/// Forward kinematics, parents first.
pub fn pose_model(model: &RelationalModel, params: &PoseParams) -> Result<PosedModel> {
    if params.nodes.len() != model.len() {
        return Err(Error::InvalidParameter(alloc::format!(
            "pose has {} node parameters for {} nodes",
            params.nodes.len(),
            model.len()
        )));
    }
    let mut out: Vec<PosedNode> = Vec::with_capacity(model.len());
    for (i, node) in model.nodes().iter().enumerate() {
        let np = params.nodes[i];
        let posed = match (node.parent, node.edge) {
            (Some(p), Some(edge)) => {
                let parent = out[p];
                let mut d = scaled(edge.d_vec, parent.s_y, parent.s_x);
                if p == 0 {
                    d += np.joint_offset;
                }
                let joint = parent.centroid + Frame2::new(parent.angle).to_image(d);
                let angle = parent.angle + np.theta;
                let centroid = joint + Frame2::new(angle).to_image(scaled(node.attr.c_vec, np.s_y, np.s_x));
                PosedNode { centroid, angle, s_y: np.s_y, s_x: np.s_x, joint: Some(joint) }
            }
            _ => PosedNode { centroid: params.translation, angle: np.theta, s_y: np.s_y, s_x: np.s_x, joint: None },
        };
        out.push(posed);
    }
    Ok(PosedModel { nodes: out })
}

/// Parameters that reproduce `posed` through [`pose_model`]. Joint offsets
/// absorb any displacement of root-child joints.
pub fn recover_params(model: &RelationalModel, posed: &PosedModel) -> PoseParams {
    let mut nodes = Vec::with_capacity(model.len());
    for (i, node) in model.nodes().iter().enumerate() {
        let me = posed.nodes[i];
        let mut np = NodeParams { theta: me.angle, s_y: me.s_y, s_x: me.s_x, joint_offset: Vec2::ZERO };
        if let (Some(p), Some(edge), Some(joint)) = (node.parent, node.edge, me.joint) {
            let parent = posed.nodes[p];
            np.theta = normalize_angle(me.angle - parent.angle);
            if p == 0 {
                let local = Frame2::new(parent.angle).to_local(joint - parent.centroid);
                np.joint_offset = local - scaled(edge.d_vec, parent.s_y, parent.s_x);
            }
        }
        nodes.push(np);
    }
    PoseParams { translation: posed.nodes[0].centroid, nodes }
}
