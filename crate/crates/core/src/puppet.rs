//! Deterministic synthetic puppet sequences with ground truth.
//!
//! The puppet is six flat-coloured rectangles (torso, head, two upper arms,
//! two forearms) over a value-noise background. Joint angles follow
//! per-joint schedules; the generator also reports the planted skeleton and
//! angles so trackers can be scored against them.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::csm::{Joint, PartSchema, Segment, Skeleton2D};
use crate::imgcore::{Label, Raster, Rgb, BACKGROUND};
use crate::math::{floor, normalize_angle, to_radians, Vec2};
use crate::{Error, Result};

/// A scalar that varies over time (degrees for angles).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    Constant { value: f64 },
    /// `offset + amplitude · sin(2π · hz · t + phase)` with `t` in seconds.
    Sine { offset: f64, amplitude: f64, hz: f64, #[serde(default)] phase_deg: f64 },
    /// Piecewise-linear through `(frame, value)` points, held at both ends.
    Keyframes { points: Vec<(f64, f64)> },
}

impl Schedule {
    pub const fn constant(value: f64) -> Self {
        Schedule::Constant { value }
    }

    pub fn at(&self, frame: usize, fps: f64) -> f64 {
        match self {
            Schedule::Constant { value } => *value,
            Schedule::Sine { offset, amplitude, hz, phase_deg } => {
                let t = frame as f64 / fps;
                offset + amplitude * libm::sin(2.0 * core::f64::consts::PI * hz * t + to_radians(*phase_deg))
            }
            Schedule::Keyframes { points } => {
                let f = frame as f64;
                match points.iter().position(|&(k, _)| k > f) {
                    None => points.last().map_or(0.0, |p| p.1),
                    Some(0) => points[0].1,
                    Some(j) => {
                        let ((f0, v0), (f1, v1)) = (points[j - 1], points[j]);
                        v0 + (v1 - v0) * (f - f0) / (f1 - f0)
                    }
                }
            }
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        let ok = match self {
            Schedule::Constant { value } => value.is_finite(),
            Schedule::Sine { offset, amplitude, hz, phase_deg } => {
                [offset, amplitude, hz, phase_deg].iter().all(|v| v.is_finite())
            }
            Schedule::Keyframes { points } => {
                !points.is_empty()
                    && points.iter().all(|p| p.0.is_finite() && p.1.is_finite())
                    && points.windows(2).all(|w| w[0].0 < w[1].0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(alloc::format!("invalid schedule for {what}")))
        }
    }
}

/// Rectangle size: `length` along the part axis, `width` across it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartSize {
    pub length: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PuppetColors {
    pub torso: Rgb,
    pub head: Rgb,
    pub left_upper_arm: Rgb,
    pub left_forearm: Rgb,
    pub right_upper_arm: Rgb,
    pub right_forearm: Rgb,
    /// Mean background colour.
    pub background: Rgb,
}

impl Default for PuppetColors {
    fn default() -> Self {
        PuppetColors {
            torso: Rgb([240, 120, 110]),
            head: Rgb([250, 215, 180]),
            left_upper_arm: Rgb([120, 235, 140]),
            left_forearm: Rgb([110, 160, 250]),
            right_upper_arm: Rgb([245, 220, 60]),
            right_forearm: Rgb([215, 135, 250]),
            background: Rgb([70, 74, 70]),
        }
    }
}

/// Angular schedules in degrees. Shoulders measure abduction away from the
/// torso's downward axis; elbows measure flexion of the forearm towards the
/// body midline; the neck tilts the head; the torso leans from upright.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuppetMotion {
    /// Torso centre at frame 0.
    pub start: Vec2,
    /// Torso displacement per frame.
    pub velocity: Vec2,
    pub torso: Schedule,
    pub neck: Schedule,
    pub left_shoulder: Schedule,
    pub right_shoulder: Schedule,
    pub left_elbow: Schedule,
    pub right_elbow: Schedule,
}

/// Full description of a synthetic sequence. The subject faces the camera,
/// so its left arm appears on the image right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuppetSpec {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub fps: f64,
    pub torso: PartSize,
    pub head: PartSize,
    pub upper_arm: PartSize,
    pub forearm: PartSize,
    /// Shoulder joint offset from the torso axis, across the torso.
    pub shoulder_lateral: f64,
    /// Shoulder joint offset below the torso top.
    pub shoulder_drop: f64,
    /// Distance from the shoulder joint to the upper arm's proximal edge.
    pub arm_hang: f64,
    pub colors: PuppetColors,
    /// Seed for the background texture.
    pub seed: u64,
    /// Peak deviation of the background texture from its mean, per channel.
    pub texture: f64,
    /// Peak brightness deviation of the texture printed on each part. The
    /// pattern is fixed in part coordinates, so it moves with the part.
    #[serde(default)]
    pub part_texture: f64,
    pub motion: PuppetMotion,
}

impl Default for PuppetSpec {
    fn default() -> Self {
        Self::tracking()
    }
}

impl PuppetSpec {
    fn base(motion: PuppetMotion) -> Self {
        PuppetSpec {
            width: 320,
            height: 240,
            frames: 60,
            fps: 30.0,
            torso: PartSize { length: 80.0, width: 40.0 },
            head: PartSize { length: 24.0, width: 24.0 },
            upper_arm: PartSize { length: 40.0, width: 16.0 },
            forearm: PartSize { length: 36.0, width: 14.0 },
            shoulder_lateral: 23.0,
            shoulder_drop: 8.0,
            arm_hang: 4.0,
            colors: PuppetColors::default(),
            seed: 7,
            texture: 28.0,
            part_texture: 12.0,
            motion,
        }
    }

    /// A still A-pose puppet.
    pub fn still() -> Self {
        Self::base(PuppetMotion {
            start: Vec2::new(159.5, 130.5),
            velocity: Vec2::ZERO,
            torso: Schedule::constant(0.0),
            neck: Schedule::constant(0.0),
            left_shoulder: Schedule::constant(45.0),
            right_shoulder: Schedule::constant(45.0),
            left_elbow: Schedule::constant(0.0),
            right_elbow: Schedule::constant(0.0),
        })
    }

    /// Elbows swinging ±40° at 0.5 Hz while the body drifts 2 px/frame.
    pub fn tracking() -> Self {
        let elbow = Schedule::Sine { offset: 0.0, amplitude: 40.0, hz: 0.5, phase_deg: 0.0 };
        let mut spec = Self::still();
        spec.motion.start = Vec2::new(99.5, 130.5);
        spec.motion.velocity = Vec2::new(2.0, 0.0);
        spec.motion.left_elbow = elbow.clone();
        spec.motion.right_elbow = elbow;
        spec
    }

    /// The left arm rises 90° above the right arm's abduction around
    /// frames 20–40, in 18° steps so that every frame in 20–40 is at least
    /// 54° apart and every frame outside is at most 36° apart.
    pub fn asymmetric() -> Self {
        let mut spec = Self::still();
        spec.motion.left_shoulder =
            Schedule::Keyframes { points: vec![(17.0, 45.0), (22.0, 135.0), (38.0, 135.0), (43.0, 45.0)] };
        spec
    }

    pub fn schema(&self) -> PartSchema {
        PartSchema::default()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.width == 0 || self.height == 0 || self.frames == 0 {
            return bad("puppet needs a non-empty frame size and at least one frame");
        }
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return bad("puppet fps must be positive");
        }
        for s in [self.torso, self.head, self.upper_arm, self.forearm] {
            if !(s.length >= 2.0 && s.width >= 2.0 && s.length.is_finite() && s.width.is_finite()) {
                return bad("puppet parts need length and width of at least 2 px");
            }
        }
        if !(self.texture >= 0.0 && self.part_texture >= 0.0 && self.arm_hang >= 0.0) {
            return bad("puppet textures and arm hang must be non-negative");
        }
        let finite = [self.shoulder_lateral, self.shoulder_drop, self.arm_hang, self.texture, self.part_texture];
        if !finite.iter().all(|v| v.is_finite()) {
            return bad("puppet offsets must be finite");
        }
        let m = &self.motion;
        for (s, name) in [
            (&m.torso, "torso"),
            (&m.neck, "neck"),
            (&m.left_shoulder, "left_shoulder"),
            (&m.right_shoulder, "right_shoulder"),
            (&m.left_elbow, "left_elbow"),
            (&m.right_elbow, "right_elbow"),
        ] {
            s.validate(name)?;
        }
        let c = &self.colors;
        let parts = [c.torso, c.head, c.left_upper_arm, c.left_forearm, c.right_upper_arm, c.right_forearm];
        let bin = |rgb: Rgb| rgb.0.map(|v| v / 16);
        for i in 0..parts.len() {
            for j in 0..i {
                if bin(parts[i]) == bin(parts[j]) {
                    return bad("puppet part colours must fall in distinct 16-level bins");
                }
            }
        }
        if self.geometry(0).overlaps(self.width, self.height) {
            return Err(Error::InvalidParameter("puppet parts overlap at frame 0".into()));
        }
        Ok(())
    }

    /// Planted joint angles at one frame (degrees).
    pub fn angles(&self, frame: usize) -> PuppetAngles {
        let m = &self.motion;
        let at = |s: &Schedule| s.at(frame, self.fps);
        PuppetAngles {
            torso: at(&m.torso),
            neck: at(&m.neck),
            left_shoulder: at(&m.left_shoulder),
            right_shoulder: at(&m.right_shoulder),
            left_elbow: at(&m.left_elbow),
            right_elbow: at(&m.right_elbow),
        }
    }

    fn geometry(&self, frame: usize) -> Geometry {
        let a = self.angles(frame);
        let m = &self.motion;
        let center = m.start + m.velocity * frame as f64;
        let lean = to_radians(a.torso);
        let up = Vec2::new(libm::sin(lean), -libm::cos(lean));
        // Image-right of an upright torso.
        let right = Vec2::new(-up.y, up.x);
        let half_t = self.torso.length * 0.5;
        let neck = center + up * half_t;
        let head_dir = up.rotate(to_radians(a.neck));
        let mut parts = vec![
            PartRect { label: 1, origin: center, dir: up, size: self.torso, centred: true },
            PartRect { label: 2, origin: neck, dir: head_dir, size: self.head, centred: false },
        ];
        let mut joints = vec![
            ("torso_center", center),
            ("neck", neck),
            ("head_center", neck + head_dir * (self.head.length * 0.5)),
        ];
        // Left arm on the image right (+right); elbow flexion turns the
        // forearm towards the midline.
        for (side, sign, shoulder_deg, elbow_deg, labels) in [
            ("left", 1.0, a.left_shoulder, a.left_elbow, (3, 4)),
            ("right", -1.0, a.right_shoulder, a.right_elbow, (5, 6)),
        ] {
            let shoulder = center + up * (half_t - self.shoulder_drop) + right * (sign * self.shoulder_lateral);
            let down = -up;
            let upper_dir = down.rotate(-sign * to_radians(shoulder_deg));
            let arm_top = shoulder + upper_dir * self.arm_hang;
            let elbow = arm_top + upper_dir * self.upper_arm.length;
            let fore_dir = upper_dir.rotate(sign * to_radians(elbow_deg));
            parts.push(PartRect { label: labels.0, origin: arm_top, dir: upper_dir, size: self.upper_arm, centred: false });
            parts.push(PartRect { label: labels.1, origin: elbow, dir: fore_dir, size: self.forearm, centred: false });
            let names: [&'static str; 3] = if side == "left" {
                ["left_shoulder", "left_elbow", "left_forearm_center"]
            } else {
                ["right_shoulder", "right_elbow", "right_forearm_center"]
            };
            joints.push((names[0], shoulder));
            joints.push((names[1], elbow));
            joints.push((names[2], elbow + fore_dir * (self.forearm.length * 0.5)));
        }
        Geometry { parts, joints, torso_top: neck }
    }

    /// Renders one frame with its ground truth.
    pub fn render(&self, frame: usize) -> Result<PuppetFrame> {
        self.validate()?;
        let g = self.geometry(frame);
        let background = self.background();
        let labels = g.labels(self.width, self.height);
        let c = &self.colors;
        let palette = [c.background, c.torso, c.head, c.left_upper_arm, c.left_forearm, c.right_upper_arm, c.right_forearm];
        let prints: Vec<PartPrint> = g.parts.iter().map(|r| PartPrint::new(r, self.seed)).collect();
        let image = Raster::from_fn(self.width, self.height, |x, y| {
            let l = labels[(x, y)];
            if l == BACKGROUND {
                return background[(x, y)];
            }
            let base = palette[l as usize];
            let k = g.parts.iter().position(|r| r.label == l).expect("painted part");
            let shade = self.part_texture * prints[k].at(&g.parts[k], Vec2::new(x as f64, y as f64));
            Rgb(base.0.map(|c| libm::round(c as f64 + shade).clamp(0.0, 255.0) as u8))
        });
        Ok(PuppetFrame { image, labels, skeleton: g.skeleton(), angles: self.angles(frame) })
    }

    /// Static textured background: bilinear value noise on a 16 px lattice
    /// plus a little per-pixel grain.
    pub fn background(&self) -> Raster<Rgb> {
        const CELL: usize = 16;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (gw, gh) = (self.width / CELL + 2, self.height / CELL + 2);
        let lattice: Vec<[f64; 3]> = (0..gw * gh)
            .map(|_| {
                let shade: f64 = rng.random_range(-1.0..1.0);
                let tint: [f64; 3] = [rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)];
                [shade + tint[0], shade + tint[1], shade + tint[2]]
            })
            .collect();
        let grain: Vec<[f64; 3]> = (0..self.width * self.height)
            .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect();
        let base = self.colors.background.0;
        Raster::from_fn(self.width, self.height, |x, y| {
            let (fx, fy) = (x as f64 / CELL as f64, y as f64 / CELL as f64);
            let (ix, iy) = (floor(fx) as usize, floor(fy) as usize);
            let (tx, ty) = (fx - ix as f64, fy - iy as f64);
            let g = |gx: usize, gy: usize, ch: usize| lattice[gy * gw + gx][ch];
            let mut out = [0u8; 3];
            for (ch, o) in out.iter_mut().enumerate() {
                let top = g(ix, iy, ch) * (1.0 - tx) + g(ix + 1, iy, ch) * tx;
                let bottom = g(ix, iy + 1, ch) * (1.0 - tx) + g(ix + 1, iy + 1, ch) * tx;
                let v = base[ch] as f64
                    + self.texture * (top * (1.0 - ty) + bottom * ty)
                    + 0.15 * self.texture * grain[y * self.width + x][ch];
                *o = libm::round(v).clamp(0.0, 255.0) as u8;
            }
            Rgb(out)
        })
    }
}

/// Planted angles at one frame (degrees), in the schedule conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PuppetAngles {
    pub torso: f64,
    pub neck: f64,
    pub left_shoulder: f64,
    pub right_shoulder: f64,
    pub left_elbow: f64,
    pub right_elbow: f64,
}

/// One rendered frame and its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct PuppetFrame {
    pub image: Raster<Rgb>,
    pub labels: Raster<Label>,
    pub skeleton: Skeleton2D,
    pub angles: PuppetAngles,
}

/// Value noise on a lattice fixed in a part's local frame.
struct PartPrint {
    cols: usize,
    values: Vec<f64>,
}

impl PartPrint {
    const CELL: f64 = 6.0;

    fn new(r: &PartRect, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(r.label as u64 + 1)));
        let cols = (r.size.length / Self::CELL) as usize + 3;
        let rows = (r.size.width / Self::CELL) as usize + 3;
        PartPrint { cols, values: (0..cols * rows).map(|_| rng.random_range(-1.0..1.0)).collect() }
    }

    /// Noise in `[-1, 1]` at image point `p` of part `r`.
    fn at(&self, r: &PartRect, p: Vec2) -> f64 {
        let d = p - r.origin;
        let lo = if r.centred { -r.size.length * 0.5 } else { 0.0 };
        let u = ((d.dot(r.dir) - lo) / Self::CELL).max(0.0);
        let v = ((d.dot(Vec2::new(-r.dir.y, r.dir.x)) + r.size.width * 0.5) / Self::CELL).max(0.0);
        let rows = self.values.len() / self.cols;
        let (iu, iv) = ((u as usize).min(self.cols - 2), (v as usize).min(rows - 2));
        let (tu, tv) = (u - iu as f64, v - iv as f64);
        let g = |c: usize, r: usize| self.values[r * self.cols + c];
        let top = g(iu, iv) * (1.0 - tu) + g(iu + 1, iv) * tu;
        let bottom = g(iu, iv + 1) * (1.0 - tu) + g(iu + 1, iv + 1) * tu;
        top * (1.0 - tv) + bottom * tv
    }
}

#[derive(Debug, Clone, Copy)]
struct PartRect {
    label: Label,
    /// Centre when `centred`, else the proximal edge midpoint.
    origin: Vec2,
    /// Unit vector along the part, pointing distally.
    dir: Vec2,
    size: PartSize,
    centred: bool,
}

impl PartRect {
    fn contains(&self, p: Vec2) -> bool {
        let d = p - self.origin;
        let u = d.dot(self.dir);
        let v = d.dot(Vec2::new(-self.dir.y, self.dir.x));
        let (lo, hi) = if self.centred { (-self.size.length * 0.5, self.size.length * 0.5) } else { (0.0, self.size.length) };
        u >= lo && u < hi && v >= -self.size.width * 0.5 && v < self.size.width * 0.5
    }
}

struct Geometry {
    parts: Vec<PartRect>,
    joints: Vec<(&'static str, Vec2)>,
    torso_top: Vec2,
}

impl Geometry {
    /// Paint order: torso, head, upper arms, forearms.
    fn labels(&self, w: usize, h: usize) -> Raster<Label> {
        let order = [0usize, 1, 2, 4, 3, 5];
        Raster::from_fn(w, h, |x, y| {
            let p = Vec2::new(x as f64, y as f64);
            let mut l = BACKGROUND;
            for &k in &order {
                if self.parts[k].contains(p) {
                    l = self.parts[k].label;
                }
            }
            l
        })
    }

    fn overlaps(&self, w: usize, h: usize) -> bool {
        (0..h).any(|y| {
            (0..w).any(|x| {
                let p = Vec2::new(x as f64, y as f64);
                self.parts.iter().filter(|r| r.contains(p)).count() > 1
            })
        })
    }

    fn joint(&self, name: &str) -> Vec2 {
        self.joints.iter().find(|j| j.0 == name).map(|j| j.1).expect("planted joint")
    }

    fn skeleton(&self) -> Skeleton2D {
        let seg = |part: &str, from: Vec2, to: Vec2| Segment { part: part.to_string(), from, to };
        Skeleton2D {
            joints: self.joints.iter().map(|&(n, at)| Joint { name: n.to_string(), at }).collect(),
            segments: vec![
                seg("torso", self.joint("torso_center"), self.torso_top),
                seg("head", self.joint("neck"), self.joint("head_center")),
                seg("left_upper_arm", self.joint("left_shoulder"), self.joint("left_elbow")),
                seg("left_forearm", self.joint("left_elbow"), self.joint("left_forearm_center")),
                seg("right_upper_arm", self.joint("right_shoulder"), self.joint("right_elbow")),
                seg("right_forearm", self.joint("right_elbow"), self.joint("right_forearm_center")),
            ],
        }
    }
}

/// Pairs of (joint name, parent segment, child segment) used for angle
/// comparison between skeletons.
pub const JOINT_SEGMENTS: [(&str, &str, &str); 5] = [
    ("neck", "torso", "head"),
    ("left_shoulder", "torso", "left_upper_arm"),
    ("left_elbow", "left_upper_arm", "left_forearm"),
    ("right_shoulder", "torso", "right_upper_arm"),
    ("right_elbow", "right_upper_arm", "right_forearm"),
];

/// Relative angle (radians, in `(-π, π]`) between the child and parent
/// segment directions at each joint of [`JOINT_SEGMENTS`] present in `sk`.
pub fn joint_angles(sk: &Skeleton2D) -> Vec<(String, f64)> {
    JOINT_SEGMENTS
        .iter()
        .filter_map(|&(name, parent, child)| {
            let (p, c) = (sk.segment(parent)?, sk.segment(child)?);
            let (dp, dc) = (p.to - p.from, c.to - c.from);
            if dp.norm() == 0.0 || dc.norm() == 0.0 {
                return None;
            }
            Some((name.to_string(), normalize_angle(dc.angle() - dp.angle())))
        })
        .collect()
}

/// Intersection over union of label `l` between two label maps.
pub fn label_iou(a: &Raster<Label>, b: &Raster<Label>, l: Label) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.values().iter().zip(b.values()) {
        let (ia, ib) = (x == l, y == l);
        inter += usize::from(ia && ib);
        union += usize::from(ia || ib);
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}
