use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::cloud::{build_cloud, Cloud, CloudParams};
use super::schema::PartSchema;
use crate::imgcore::{morph_skeleton, pca_orientation, signed_edt, DistanceMap, Label, Raster};
use crate::math::{abs, normalize_angle, Frame2, Vec2};
use crate::{Error, Result};

/// Per-node scales and centroid offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeAttr {
    pub s_y: f64,
    pub s_x: f64,
    /// Centroid offset from the parent joint in the node's local frame. For the
    /// root this is the centroid position in image coordinates.
    pub c_vec: Vec2,
}

/// Joint relation between a node and its parent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeAttr {
    /// Angle of the child's primary axis relative to the parent's.
    pub theta: f64,
    /// Joint offset from the parent centroid in the parent's local frame.
    pub d_vec: Vec2,
}

/// One body part of the relational model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelNode {
    pub name: String,
    pub label: Label,
    pub parent: Option<usize>,
    pub joint_name: Option<String>,
    pub cloud: Cloud,
    pub attr: NodeAttr,
    /// `None` for the root.
    pub edge: Option<EdgeAttr>,
    /// Global orientation of the primary axis at the reference frame.
    pub angle: f64,
    /// Half the part length along its primary axis at the reference frame.
    pub half_length: f64,
    /// Joint with the parent at the reference frame.
    pub joint: Option<Vec2>,
}

/// Tree of part clouds rooted at node 0. Nodes are stored parents-first.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationalModel {
    nodes: Vec<ModelNode>,
    children: Vec<Vec<usize>>,
    limbs: Vec<Vec<usize>>,
    width: usize,
    height: usize,
}

impl RelationalModel {
    /// Assembles a model from parents-first nodes and limb chains.
    pub fn new(nodes: Vec<ModelNode>, limbs: Vec<Vec<usize>>, width: usize, height: usize) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidSchema(m.into()));
        if nodes.is_empty() || nodes[0].parent.is_some() || nodes[0].edge.is_some() {
            return bad("node 0 must be the only root");
        }
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, n) in nodes.iter().enumerate().skip(1) {
            match (n.parent, n.edge) {
                (Some(p), Some(_)) if p < i => children[p].push(i),
                _ => return bad("nodes must be stored parents-first with one edge each"),
            }
            if n.attr.s_y <= 0.0 || n.attr.s_x <= 0.0 {
                return bad("node scales must be positive");
            }
        }
        let mut used = vec![false; nodes.len()];
        for limb in &limbs {
            for (j, &i) in limb.iter().enumerate() {
                if i == 0 || i >= nodes.len() || used[i] {
                    return bad("limbs must be disjoint and exclude the root");
                }
                if j > 0 && nodes[i].parent != Some(limb[j - 1]) {
                    return bad("limb is not a parent-child chain");
                }
                used[i] = true;
            }
        }
        Ok(RelationalModel { nodes, children, limbs, width, height })
    }

    pub fn nodes(&self) -> &[ModelNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &ModelNode {
        &self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn limbs(&self) -> &[Vec<usize>] {
        &self.limbs
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn by_label(&self, label: Label) -> Option<usize> {
        self.nodes.iter().position(|n| n.label == label)
    }

    /// Search groups: the root, then every non-limb node on its own, then the
    /// limbs, ordered so that each group's parents are searched earlier.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut in_limb = vec![false; self.nodes.len()];
        for limb in &self.limbs {
            for &i in limb {
                in_limb[i] = true;
            }
        }
        let mut groups: Vec<Vec<usize>> = (0..self.nodes.len()).filter(|&i| !in_limb[i]).map(|i| vec![i]).collect();
        groups.extend(self.limbs.iter().cloned());
        groups.sort_by_key(|g| g[0]);
        groups
    }

    /// Whether `ancestor` lies on the path from `i` to the root (inclusive).
    pub fn is_descendant(&self, i: usize, ancestor: usize) -> bool {
        let mut cur = Some(i);
        while let Some(c) = cur {
            if c == ancestor {
                return true;
            }
            cur = self.nodes[c].parent;
        }
        false
    }
}

struct PartData {
    dt: DistanceMap,
    centroid: Vec2,
    axis: Vec2,
    angle: f64,
    half_length: f64,
}

/// Builds the relational model from a labeled reference frame.
pub fn build_model(labels: &Raster<Label>, schema: &PartSchema, params: CloudParams) -> Result<RelationalModel> {
    params.validate()?;
    let (root, parents) = schema.validate()?;
    let (w, h) = (labels.width(), labels.height());

    // Parents-first order: depth-first from the root, children in schema order.
    let mut order = Vec::with_capacity(schema.parts.len());
    let mut stack = vec![root];
    while let Some(i) = stack.pop() {
        order.push(i);
        let kids: Vec<usize> = (0..parents.len()).filter(|&j| parents[j] == Some(i)).collect();
        stack.extend(kids.into_iter().rev());
    }
    let mut position = vec![0usize; schema.parts.len()];
    for (pos, &i) in order.iter().enumerate() {
        position[i] = pos;
    }

    let mut by_label: Vec<Vec<usize>> = vec![Vec::new(); 256];
    for (i, &l) in labels.values().iter().enumerate() {
        by_label[l as usize].push(i);
    }

    let mut limb_of = vec![None; schema.parts.len()];
    for (li, limb) in schema.limbs.iter().enumerate() {
        for name in limb {
            limb_of[schema.index_of(name).expect("validated")] = Some(li);
        }
    }
    let limb_skeletons: Vec<Vec<usize>> = schema
        .limbs
        .iter()
        .map(|limb| {
            let members: Vec<Label> = limb.iter().map(|n| schema.parts[schema.index_of(n).expect("validated")].label).collect();
            let mask = labels.map(|l| members.contains(l));
            if mask.values().iter().any(|&b| b) {
                morph_skeleton(&mask).map(|s| s.into_iter().map(|(x, y)| y * w + x).collect()).unwrap_or_default()
            } else {
                Vec::new()
            }
        })
        .collect();

    let coords = |idx: &[usize]| -> Vec<Vec2> { idx.iter().map(|&i| Vec2::new((i % w) as f64, (i / w) as f64)).collect() };

    // Parents first, so near-isotropic parts can inherit their parent's axis.
    let mut data: Vec<Option<PartData>> = (0..schema.parts.len()).map(|_| None).collect();
    for &si in &order {
        let part = &schema.parts[si];
        let pixels = core::mem::take(&mut by_label[part.label as usize]);
        if pixels.is_empty() {
            return Err(Error::MissingPart(part.name.clone()));
        }
        if !is_connected(labels, &pixels, part.label) {
            return Err(Error::DisconnectedPart(part.name.clone()));
        }
        let dt = signed_edt(labels, part.label)?;
        let pts = coords(&pixels);
        let body = pca_orientation(&pts).ok();
        let centroid = mean(&pts);
        let frame = match limb_of[si] {
            Some(li) => {
                let support: Vec<usize> =
                    limb_skeletons[li].iter().copied().filter(|&i| dt.signed().values()[i] < params.gamma_p).collect();
                pca_orientation(&coords(&support)).ok().or(body)
            }
            None => body,
        };
        let inherited = parents[si].and_then(|k| data[k].as_ref()).map_or(Vec2::new(0.0, -1.0), |p| p.axis);
        let axis = match frame {
            Some(f) if f.secondary_sd < ISOTROPY_RATIO * f.primary_sd => f.primary_axis,
            _ => inherited,
        };
        let half_length = pts.iter().map(|&p| abs((p - centroid).dot(axis))).fold(0.0, f64::max) + 0.5;
        data[si] = Some(PartData { dt, centroid, axis, angle: axis.angle(), half_length });
    }
    let data: Vec<PartData> = data.into_iter().map(|d| d.expect("every part visited")).collect();

    let in_band = |d: f64| d > params.gamma_n && d < params.gamma_p;
    let mut nodes: Vec<ModelNode> = Vec::with_capacity(order.len());
    for &si in &order {
        let part = &schema.parts[si];
        let d = &data[si];
        let mut cloud = build_cloud(&d.dt, params)?;
        cloud.angle = d.angle;
        let parent_si = parents[si];
        let (attr, edge, joint) = match parent_si {
            None => (NodeAttr { s_y: 1.0, s_x: 1.0, c_vec: d.centroid }, None, None),
            Some(pk) => {
                let p = &data[pk];
                let (line_point, line_dir) = if limb_of[si].is_some() { (d.centroid, d.axis) } else { (p.centroid, p.axis) };
                let joint = place_joint(
                    w,
                    w * h,
                    |i| in_band(d.dt.signed().values()[i]),
                    |i| in_band(p.dt.signed().values()[i]),
                    d.centroid,
                    p.centroid,
                    line_point,
                    line_dir,
                );
                let parent_frame = Frame2::new(p.angle);
                let own_frame = Frame2::new(d.angle);
                (
                    NodeAttr { s_y: 1.0, s_x: 1.0, c_vec: own_frame.to_local(d.centroid - joint) },
                    Some(EdgeAttr {
                        theta: normalize_angle(d.angle - p.angle),
                        d_vec: parent_frame.to_local(joint - p.centroid),
                    }),
                    Some(joint),
                )
            }
        };
        nodes.push(ModelNode {
            name: part.name.clone(),
            label: part.label,
            parent: parent_si.map(|k| position[k]),
            joint_name: part.joint.clone(),
            cloud,
            attr,
            edge,
            angle: d.angle,
            half_length: d.half_length,
            joint,
        });
    }
    let limbs = schema
        .limbs
        .iter()
        .map(|limb| limb.iter().map(|n| position[schema.index_of(n).expect("validated")]).collect())
        .collect();
    RelationalModel::new(nodes, limbs, w, h)
}

fn mean(pts: &[Vec2]) -> Vec2 {
    let mut s = Vec2::ZERO;
    for &p in pts {
        s += p;
    }
    s * (1.0 / pts.len() as f64)
}

fn is_connected(labels: &Raster<Label>, pixels: &[usize], l: Label) -> bool {
    let mut seen = vec![false; labels.len()];
    let mut stack = vec![pixels[0]];
    seen[pixels[0]] = true;
    let mut count = 0;
    while let Some(i) = stack.pop() {
        count += 1;
        for n in labels.neighbors8(i) {
            if !seen[n] && labels.values()[n] == l {
                seen[n] = true;
                stack.push(n);
            }
        }
    }
    count == pixels.len()
}

/// Parts whose principal spreads are closer than this ratio have no reliable
/// axis and take their parent's orientation (upright for the root).
const ISOTROPY_RATIO: f64 = 0.9;
/// Distance from a pixel to the axis line below which it counts as on-axis.
const AXIS_TOLERANCE: f64 = 0.75;
/// Candidates whose distance sum is within this of the minimum are averaged.
const TIE_TOLERANCE: f64 = 1.0;

/// Joint between a child and its parent: the on-axis pixel of the
/// intersection of both uncertainty bands that is jointly closest to the two
/// centroids. Near-ties are averaged. Falls back to the whole intersection
/// when no pixel lies on the axis, and to the midpoint of the closest pair
/// when the bands do not meet.
#[allow(clippy::too_many_arguments)]
fn place_joint(
    width: usize,
    len: usize,
    in_child: impl Fn(usize) -> bool,
    in_parent: impl Fn(usize) -> bool,
    c_child: Vec2,
    c_parent: Vec2,
    line_point: Vec2,
    line_dir: Vec2,
) -> Vec2 {
    let at = |i: usize| Vec2::new((i % width) as f64, (i / width) as f64);
    let both: Vec<Vec2> = (0..len).filter(|&i| in_child(i) && in_parent(i)).map(at).collect();
    if both.is_empty() {
        let a: Vec<Vec2> = (0..len).filter(|&i| in_child(i)).map(at).collect();
        let b: Vec<Vec2> = (0..len).filter(|&i| in_parent(i)).map(at).collect();
        let mut best = (f64::INFINITY, (c_child + c_parent) * 0.5);
        for &p in &a {
            for &q in &b {
                let d = p.distance(q);
                if d < best.0 {
                    best = (d, (p + q) * 0.5);
                }
            }
        }
        return best.1;
    }
    let on_axis: Vec<Vec2> =
        both.iter().copied().filter(|&p| abs(line_dir.cross(p - line_point)) <= AXIS_TOLERANCE).collect();
    let candidates = if on_axis.is_empty() { both } else { on_axis };
    let score = |p: Vec2| p.distance(c_child) + p.distance(c_parent);
    let best = candidates.iter().map(|&p| score(p)).fold(f64::INFINITY, f64::min);
    let near: Vec<Vec2> = candidates.into_iter().filter(|&p| score(p) <= best + TIE_TOLERANCE).collect();
    mean(&near)
}
