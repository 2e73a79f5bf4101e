use alloc::vec::Vec;

use super::cloud::Cloud;
use super::kinematics::PosedNode;
use crate::imgcore::{Label, PixelRect};
use crate::math::{ceil, floor, Vec2};
use crate::{Error, Result};

/// Memberships within this distance of 0 or 1 snap to exterior/interior.
pub const SNAP_EPS: f64 = 1e-6;

/// A cloud resampled onto the frame grid for one pose.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    label: Label,
    frame_width: usize,
    frame_height: usize,
    rect: PixelRect,
    membership: Vec<f64>,
}

impl Projection {
    pub fn label(&self) -> Label {
        self.label
    }

    pub fn frame_width(&self) -> usize {
        self.frame_width
    }

    pub fn frame_height(&self) -> usize {
        self.frame_height
    }

    /// Frame rectangle outside which membership is zero.
    pub fn rect(&self) -> PixelRect {
        self.rect
    }

    /// Snapped membership at frame pixel `(x, y)`; zero outside the rectangle.
    pub fn at(&self, x: usize, y: usize) -> f64 {
        if self.rect.contains(x, y) {
            self.membership[(y - self.rect.y0) * self.rect.width() + (x - self.rect.x0)]
        } else {
            0.0
        }
    }

    pub fn at_index(&self, idx: usize) -> f64 {
        self.at(idx % self.frame_width, idx / self.frame_width)
    }

    fn indices(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let rw = self.rect.width();
        self.membership
            .iter()
            .enumerate()
            .map(move |(k, &m)| ((self.rect.y0 + k / rw) * self.frame_width + self.rect.x0 + k % rw, m))
    }

    /// Interior pixels (membership 1), row-major.
    pub fn interior(&self) -> Vec<usize> {
        self.indices().filter(|&(_, m)| m == 1.0).map(|(i, _)| i).collect()
    }

    /// Uncertainty pixels with their membership, row-major.
    pub fn uncertainty(&self) -> Vec<(usize, f64)> {
        self.indices().filter(|&(_, m)| m > 0.0 && m < 1.0).collect()
    }

    /// Exterior pixels 8-adjacent to the uncertainty band, row-major.
    pub fn exterior_band(&self) -> Vec<usize> {
        let (w, h) = (self.frame_width as i64, self.frame_height as i64);
        let r = self.rect;
        let mut out = Vec::new();
        for y in r.y0.saturating_sub(1)..(r.y1 + 1).min(self.frame_height) {
            for x in r.x0.saturating_sub(1)..(r.x1 + 1).min(self.frame_width) {
                if self.at(x, y) != 0.0 {
                    continue;
                }
                let touches = crate::imgcore::NEIGHBORS_8.iter().any(|&(dx, dy)| {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    nx >= 0 && ny >= 0 && nx < w && ny < h && {
                        let m = self.at(nx as usize, ny as usize);
                        m > 0.0 && m < 1.0
                    }
                });
                if touches {
                    out.push(y * self.frame_width + x);
                }
            }
        }
        out
    }
}

/// Resamples `cloud` at the placement `posed` onto a `width`×`height` frame.
///
/// Each frame pixel is mapped back through the node's similarity transform
/// (scale along the local axes, then rotation, then translation) and the
/// membership is interpolated bilinearly.
pub fn project_cloud(cloud: &Cloud, posed: &PosedNode, width: usize, height: usize) -> Result<Projection> {
    // Frame offset p - c to crop offset: R(φ0) · S⁻¹ · R(-φ).
    let (c1, s1) = (libm::cos(posed.angle), libm::sin(posed.angle));
    let (c0, s0) = (libm::cos(cloud.angle()), libm::sin(cloud.angle()));
    let to_crop = |off: Vec2| -> Vec2 {
        let u = (c1 * off.x + s1 * off.y) / posed.s_y;
        let v = (-s1 * off.x + c1 * off.y) / posed.s_x;
        Vec2::new(c0 * u - s0 * v, s0 * u + c0 * v)
    };
    let to_frame = |q: Vec2| -> Vec2 {
        let u = (c0 * q.x + s0 * q.y) * posed.s_y;
        let v = (-s0 * q.x + c0 * q.y) * posed.s_x;
        Vec2::new(c1 * u - s1 * v, s1 * u + c1 * v)
    };
    let cc = cloud.centroid();
    let (cw, ch) = (cloud.width() as f64 - 1.0, cloud.height() as f64 - 1.0);
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for corner in [Vec2::new(0.0, 0.0), Vec2::new(cw, 0.0), Vec2::new(0.0, ch), Vec2::new(cw, ch)] {
        let p = posed.centroid + to_frame(corner - cc);
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let clip = |v: f64, hi: usize| -> usize { v.clamp(0.0, hi as f64) as usize };
    if !(x0.is_finite() && y0.is_finite() && x1.is_finite() && y1.is_finite()) {
        return Err(Error::OffFrame(cloud.label()));
    }
    let rect = PixelRect {
        x0: clip(floor(x0) - 1.0, width),
        y0: clip(floor(y0) - 1.0, height),
        x1: clip(ceil(x1) + 2.0, width),
        y1: clip(ceil(y1) + 2.0, height),
    };
    let mut membership = Vec::with_capacity(rect.width() * rect.height());
    let mut support = false;
    for y in rect.y0..rect.y1 {
        for x in rect.x0..rect.x1 {
            let q = cc + to_crop(Vec2::new(x as f64, y as f64) - posed.centroid);
            let mut m = cloud.sample(q.x, q.y);
            if m <= SNAP_EPS {
                m = 0.0;
            } else if m >= 1.0 - SNAP_EPS {
                m = 1.0;
            }
            support |= m > 0.0;
            membership.push(m);
        }
    }
    if !support {
        return Err(Error::OffFrame(cloud.label()));
    }
    Ok(Projection { label: cloud.label(), frame_width: width, frame_height: height, rect, membership })
}
