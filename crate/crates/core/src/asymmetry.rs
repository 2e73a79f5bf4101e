//! Arm angles, per-frame asymmetry scores and sequence-level static and
//! dynamic symmetry.
//!
//! All angles are in degrees. Upper-arm angles `u` are unsigned and measured
//! from the image-down vertical, so mirrored arms read alike. Forearm angles
//! `f` are signed against the horizontal, positive when the forearm points
//! above it. Elbow angles `e` are interior angles, 180 for a straight arm.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::csm::Skeleton2D;
use crate::math::{acos, atan2, exp, round, to_degrees, Vec2};
use crate::{Error, Result};

/// Thresholds of the asymmetry analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AsymmetryConfig {
    /// Segment angle difference scored exactly 1.
    pub tau_deg: f64,
    /// Sigmoid spread; `τ/3` by default.
    pub sigma_deg: f64,
    /// Minimum AS* of an asymmetric frame.
    pub score_threshold: f64,
    /// Minimum AD_f of an asymmetric frame.
    pub forearm_threshold_deg: f64,
}

impl Default for AsymmetryConfig {
    fn default() -> Self {
        AsymmetryConfig { tau_deg: 45.0, sigma_deg: 15.0, score_threshold: 1.0, forearm_threshold_deg: 45.0 }
    }
}

impl AsymmetryConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.tau_deg, self.score_threshold, self.forearm_threshold_deg].iter().all(|v| v.is_finite() && *v >= 0.0)
            && self.sigma_deg.is_finite()
            && self.sigma_deg > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("asymmetry thresholds must be finite, non-negative, with σ > 0".into()))
        }
    }
}

/// Angles of both arms in one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmAngles {
    pub u_l: f64,
    pub u_r: f64,
    pub e_l: f64,
    pub e_r: f64,
    pub f_l: f64,
    pub f_r: f64,
}

/// Asymmetry scores of one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryRecord {
    pub frame: usize,
    pub angles: ArmAngles,
    pub as_u: f64,
    pub as_f: f64,
    pub as_star: f64,
    pub ad_f: f64,
    pub asymmetric: bool,
}

struct Arm {
    u: f64,
    e: f64,
    f: f64,
}

fn unit_angle(a: Vec2, b: Vec2) -> f64 {
    to_degrees(acos((a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0)))
}

fn arm(sk: &Skeleton2D, side: &'static str) -> Result<Arm> {
    let (upper, fore) = match side {
        "left" => ("left_upper_arm", "left_forearm"),
        _ => ("right_upper_arm", "right_forearm"),
    };
    let (Some(up), Some(fa)) = (sk.segment(upper), sk.segment(fore)) else {
        return Err(Error::MissingArm(side));
    };
    let (du, df) = (up.to - up.from, fa.to - fa.from);
    let finite = |v: Vec2| v.x.is_finite() && v.y.is_finite() && v.norm() > 0.0;
    if !finite(du) || !finite(df) {
        return Err(Error::MissingArm(side));
    }
    Ok(Arm {
        u: unit_angle(du, Vec2::new(0.0, 1.0)),
        // Interior angle between the elbow-to-shoulder and elbow-to-hand rays.
        e: unit_angle(Vec2::new(-du.x, -du.y), df),
        f: to_degrees(atan2(-df.y, df.x.abs())),
    })
}

/// Arm angles read from the `*_upper_arm` and `*_forearm` segments.
pub fn arm_angles(sk: &Skeleton2D) -> Result<ArmAngles> {
    let (l, r) = (arm(sk, "left")?, arm(sk, "right")?);
    Ok(ArmAngles { u_l: l.u, u_r: r.u, e_l: l.e, e_r: r.e, f_l: l.f, f_r: r.f })
}

/// Normalized segment asymmetry `2 / (1 + exp(-(α - τ)/σ))`, in `[0, 2)`.
pub fn asymmetry_score(alpha_deg: f64, tau_deg: f64, sigma_deg: f64) -> f64 {
    2.0 / (1.0 + exp(-(alpha_deg - tau_deg) / sigma_deg))
}

/// Scores one skeleton. Fails with [`Error::MissingArm`] when an arm chain
/// is absent; such frames are not evaluable.
pub fn frame_asymmetry(frame: usize, sk: &Skeleton2D, cfg: &AsymmetryConfig) -> Result<AsymmetryRecord> {
    Ok(record_from_angles(frame, arm_angles(sk)?, cfg))
}

/// Scores one frame from its arm angles.
pub fn record_from_angles(frame: usize, a: ArmAngles, cfg: &AsymmetryConfig) -> AsymmetryRecord {
    let as_u = asymmetry_score((a.u_l - a.u_r).abs(), cfg.tau_deg, cfg.sigma_deg);
    let as_f = asymmetry_score((a.e_l - a.e_r).abs(), cfg.tau_deg, cfg.sigma_deg);
    let as_star = as_u.max(as_f);
    let ad_f = (a.f_l - a.f_r).abs();
    let asymmetric = as_star >= cfg.score_threshold && ad_f >= cfg.forearm_threshold_deg;
    AsymmetryRecord { frame, angles: a, as_u, as_f, as_star, ad_f, asymmetric }
}

/// Static and dynamic symmetry of a sequence, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetrySummary {
    /// Share of evaluable frames that are asymmetric.
    pub ss: f64,
    /// Share of windows holding at least one asymmetric frame.
    pub ds: f64,
    pub window: usize,
    pub evaluable_frames: usize,
    pub windows: usize,
}

/// Frames per half-second window, at least one.
pub fn window_size(fps: f64) -> usize {
    (round(fps / 2.0) as usize).max(1)
}

/// SS and DS of a per-frame series where `None` marks a non-evaluable frame.
///
/// Windows are consecutive blocks of `round(fps/2)` frames with a final
/// partial block. Non-evaluable frames leave both denominators: a window
/// with no evaluable frame is not counted.
pub fn static_dynamic_symmetry(flags: &[Option<bool>], fps: f64) -> Result<SymmetrySummary> {
    if !(fps > 0.0 && fps.is_finite()) {
        return Err(Error::InvalidParameter("fps must be positive".into()));
    }
    let evaluable: Vec<bool> = flags.iter().flatten().copied().collect();
    if evaluable.is_empty() {
        return Err(Error::EmptySeries);
    }
    let window = window_size(fps);
    let (mut windows, mut hits) = (0usize, 0usize);
    for block in flags.chunks(window) {
        if block.iter().any(Option::is_some) {
            windows += 1;
            hits += usize::from(block.contains(&Some(true)));
        }
    }
    let asym = evaluable.iter().filter(|&&a| a).count();
    Ok(SymmetrySummary {
        ss: 100.0 * asym as f64 / evaluable.len() as f64,
        ds: 100.0 * hits as f64 / windows as f64,
        window,
        evaluable_frames: evaluable.len(),
        windows,
    })
}
