use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::kinematics::PosedModel;
use super::model::RelationalModel;
use crate::math::{Frame2, Vec2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Joint {
    pub name: String,
    pub at: Vec2,
}

/// Line segment drawn for one part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub part: String,
    pub from: Vec2,
    pub to: Vec2,
}

/// 2D stick figure of one frame.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Skeleton2D {
    pub joints: Vec<Joint>,
    pub segments: Vec<Segment>,
}

impl Skeleton2D {
    pub fn joint(&self, name: &str) -> Option<Vec2> {
        self.joints.iter().find(|j| j.name == name).map(|j| j.at)
    }

    pub fn segment(&self, part: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.part == part)
    }
}

/// Stick figure of a posed model.
///
/// Joints come straight from the kinematics. A part's segment runs from its
/// joint to its first child's joint, or to its own centroid when it has no
/// children (the forearm-centre endpoint). The root segment runs from its
/// centroid along its primary axis to the end of the part.
pub fn extract_pose(model: &RelationalModel, posed: &PosedModel) -> Skeleton2D {
    let mut sk = Skeleton2D::default();
    let root = model.node(0);
    let rp = posed.nodes[0];
    sk.joints.push(Joint { name: format!("{}_center", root.name), at: rp.centroid });
    let top = rp.centroid + Frame2::new(rp.angle).to_image(Vec2::new(root.half_length * rp.s_y, 0.0));
    sk.segments.push(Segment { part: root.name.clone(), from: rp.centroid, to: top });
    for (i, node) in model.nodes().iter().enumerate().skip(1) {
        let me = posed.nodes[i];
        let joint = me.joint.unwrap_or(me.centroid);
        let name = node.joint_name.clone().unwrap_or_else(|| format!("{}_joint", node.name));
        sk.joints.push(Joint { name, at: joint });
        let to = match model.children(i).first() {
            Some(&c) => posed.nodes[c].joint.unwrap_or(posed.nodes[c].centroid),
            None => {
                sk.joints.push(Joint { name: format!("{}_center", node.name), at: me.centroid });
                me.centroid
            }
        };
        sk.segments.push(Segment { part: node.name.clone(), from: joint, to });
    }
    sk
}
