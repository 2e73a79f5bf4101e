use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::horn_schunck::FlowField;
use crate::csm::{pose_model, Cloud, PoseParams, RelationalModel};
use crate::imgcore::{pca_orientation, Label, Raster};
use crate::math::{median, normalize_angle, sqrt, to_radians, Frame2, Vec2};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimateConfig {
    /// Angle bound for limb joints (degrees).
    pub limb_angle_deg: f64,
    /// Angle bound for non-limb joints such as the neck (degrees).
    pub neck_angle_deg: f64,
    /// Angle bound for the root's global orientation (degrees).
    pub torso_angle_deg: f64,
    /// Absolute bound on each scale change.
    pub scale: f64,
    /// Joint-offset bound as a multiple of the estimated offset change.
    pub beta: f64,
    /// Root translation bound as a multiple of its estimated displacement.
    pub translation_beta: f64,
    /// Lower limit of the root translation bound (pixels).
    pub translation_floor: f64,
    /// Clamp every estimate to its own bound around the previous frame.
    pub motion_guard: bool,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            limb_angle_deg: 30.0,
            neck_angle_deg: 5.0,
            torso_angle_deg: 10.0,
            scale: 0.02,
            beta: 1.5,
            translation_beta: 1.5,
            translation_floor: 2.0,
            motion_guard: true,
        }
    }
}

/// Search half-widths for one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeBounds {
    pub theta: f64,
    pub s_y: f64,
    pub s_x: f64,
    /// Half-width for each joint-offset component.
    pub offset: f64,
}

/// Warm start for the next frame's search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    pub params: PoseParams,
    pub bounds: Vec<NodeBounds>,
    /// Half-width for each root translation component.
    pub translation_bound: f64,
    /// Parts missing from either label map; their parameters are copied.
    pub lost: Vec<bool>,
}

struct Spread {
    axis: Vec2,
    isotropic: bool,
}

fn coords_of(labels: &Raster<Label>, l: Label) -> Vec<Vec2> {
    let w = labels.width();
    labels
        .values()
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v == l)
        .map(|(i, _)| Vec2::new((i % w) as f64, (i / w) as f64))
        .collect()
}

fn spread(pts: &[Vec2]) -> Option<Spread> {
    let f = pca_orientation(pts).ok()?;
    Some(Spread { axis: f.primary_axis, isotropic: f.secondary_sd >= 0.9 * f.primary_sd })
}

/// Standard deviation of `pts` projected on `axis`.
fn sd_along(pts: &[Vec2], axis: Vec2) -> f64 {
    let n = pts.len() as f64;
    let mean = pts.iter().map(|p| p.dot(axis)).sum::<f64>() / n;
    sqrt(pts.iter().map(|p| (p.dot(axis) - mean) * (p.dot(axis) - mean)).sum::<f64>() / n)
}

/// Axis rotation in `(-π/2, π/2]`: PCA axes are only defined up to sign.
fn axis_turn(from: Vec2, to: Vec2) -> f64 {
    let mut d = normalize_angle(to.angle() - from.angle());
    if d > core::f64::consts::FRAC_PI_2 {
        d -= core::f64::consts::PI;
    } else if d <= -core::f64::consts::FRAC_PI_2 {
        d += core::f64::consts::PI;
    }
    d
}

/// Pixels of a cloud's support in frame coordinates. At the reference pose
/// these are exactly the part's pixels.
fn support_points(cloud: &Cloud) -> Vec<Vec2> {
    let (ox, oy) = cloud.origin();
    let w = cloud.width();
    cloud
        .membership()
        .iter()
        .enumerate()
        .filter(|&(_, &m)| m >= 0.5)
        .map(|(i, _)| Vec2::new((i % w) as f64 + ox as f64, (i / w) as f64 + oy as f64))
        .collect()
}

/// Turn from a node's model angle to the principal axis of its support,
/// which is what label PCA measures on a posed part.
fn support_axis_offset(support: &[Vec2], angle: f64) -> Option<f64> {
    let s = spread(support)?;
    (!s.isotropic).then(|| axis_turn(Vec2::from_angle(angle), s.axis))
}

fn clamp_around(value: f64, centre: f64, bound: f64) -> f64 {
    value.clamp(centre - bound, centre + bound)
}

/// Estimates the next frame's parameters from labels at `t`, labels
/// propagated to `t+1` and the flow between the frames.
///
/// Each part takes the principal axis of its propagated pixels as its new
/// orientation and its scales are the ratio of its propagated coordinate
/// spreads to those of the reference part. The root moves by the median flow of its pixels. Joints of the
/// root's children move with the median flow of their part, expressed as a
/// joint offset.
pub fn estimate_params(
    model: &RelationalModel,
    params_t: &PoseParams,
    labels_t: &Raster<Label>,
    propagated: &Raster<Label>,
    flow: &FlowField,
    cfg: &EstimateConfig,
) -> Result<ParamEstimate> {
    labels_t.check_same_size(propagated)?;
    labels_t.check_same_size(flow)?;
    let posed_t = pose_model(model, params_t)?;
    let n = model.len();
    let mut in_limb = vec![false; n];
    for limb in model.limbs() {
        for &i in limb {
            in_limb[i] = true;
        }
    }
    let angle_bound = |i: usize| {
        to_radians(if i == 0 {
            cfg.torso_angle_deg
        } else if in_limb[i] {
            cfg.limb_angle_deg
        } else {
            cfg.neck_angle_deg
        })
    };
    let median_flow = |pts: &[Vec2]| -> Vec2 {
        let w = flow.width();
        let mut dx: Vec<f64> = pts.iter().map(|p| flow.values()[p.y as usize * w + p.x as usize].x).collect();
        let mut dy: Vec<f64> = pts.iter().map(|p| flow.values()[p.y as usize * w + p.x as usize].y).collect();
        Vec2::new(median(&mut dx).unwrap_or(0.0), median(&mut dy).unwrap_or(0.0))
    };

    let mut params = params_t.clone();
    let mut bounds = Vec::with_capacity(n);
    let mut lost = vec![false; n];
    let mut turn = vec![0.0; n];
    let mut translation_bound = cfg.translation_floor;

    for (i, node) in model.nodes().iter().enumerate() {
        let prev = params_t.nodes[i];
        let mut b = NodeBounds { theta: angle_bound(i), s_y: cfg.scale, s_x: cfg.scale, offset: 0.0 };
        let parent_turn = node.parent.map_or(0.0, |p| turn[p]);
        let (pts_t, pts_n) = (coords_of(labels_t, node.label), coords_of(propagated, node.label));
        let (st, sn) = (spread(&pts_t), spread(&pts_n));
        let (Some(st), Some(sn)) = (st, sn) else {
            lost[i] = true;
            turn[i] = parent_turn;
            b.theta *= 2.0;
            bounds.push(b);
            continue;
        };
        // The new orientation is the propagated principal axis itself, taken
        // near the current angle, so errors do not accumulate over frames.
        let axis_t = Vec2::from_angle(posed_t.nodes[i].angle);
        let support = support_points(&node.cloud);
        let d_phi = match support_axis_offset(&support, node.angle) {
            Some(off) if !st.isotropic && !sn.isotropic => axis_turn(axis_t.rotate(off), sn.axis),
            _ => parent_turn,
        };
        turn[i] = d_phi;
        let axis_n = axis_t.rotate(d_phi);
        // Scales compare against the reference spread, not the spread at `t`,
        // so a shrunken fit cannot ratchet further down.
        let axis_ref = Vec2::from_angle(node.angle);
        let (sd_r_y, sd_r_x) = (sd_along(&support, axis_ref), sd_along(&support, axis_ref.perp()));
        let (sd_n_y, sd_n_x) = (sd_along(&pts_n, axis_n), sd_along(&pts_n, axis_n.perp()));
        let est = &mut params.nodes[i];
        if sd_r_y > 0.0 {
            est.s_y = sd_n_y / sd_r_y;
        }
        if sd_r_x > 0.0 {
            est.s_x = sd_n_x / sd_r_x;
        }
        est.theta = if i == 0 { prev.theta + d_phi } else { normalize_angle(prev.theta + d_phi - parent_turn) };
        if i == 0 {
            let shift = median_flow(&pts_t);
            params.translation = params_t.translation + shift;
            translation_bound = (cfg.translation_beta * shift.norm()).max(cfg.translation_floor);
        }
        if cfg.motion_guard {
            let est = &mut params.nodes[i];
            est.theta = clamp_around(est.theta, prev.theta, b.theta);
            est.s_y = clamp_around(est.s_y, prev.s_y, b.s_y);
            est.s_x = clamp_around(est.s_x, prev.s_x, b.s_x);
        }
        bounds.push(b);
    }

    // Joint offsets of the root's children follow their part's median flow.
    let root_est = pose_model(model, &params)?;
    for (i, node) in model.nodes().iter().enumerate() {
        if node.parent != Some(0) || lost[i] {
            continue;
        }
        let (Some(edge), Some(joint_t)) = (node.edge, posed_t.nodes[i].joint) else { continue };
        let target = joint_t + median_flow(&coords_of(labels_t, node.label));
        let parent = root_est.nodes[0];
        let local = Frame2::new(parent.angle).to_local(target - parent.centroid);
        let offset = local - Vec2::new(edge.d_vec.x * parent.s_y, edge.d_vec.y * parent.s_x);
        let prev = params_t.nodes[i].joint_offset;
        params.nodes[i].joint_offset = offset;
        bounds[i].offset = cfg.beta * (offset - prev).norm();
    }
    if params.nodes.iter().any(|p| !(p.s_y > 0.0 && p.s_x > 0.0)) {
        return Err(Error::InvalidParameter("estimated scale collapsed".into()));
    }
    Ok(ParamEstimate { params, bounds, translation_bound, lost })
}
