use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::imgcore::{DistanceMap, Label};
use crate::math::{exp, floor, Vec2};
use crate::{Error, Result};

/// Shape of the sigmoid that turns a signed distance map into a cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CloudParams {
    /// Outer limit of the uncertainty band (pixels, positive).
    pub gamma_p: f64,
    /// Inner limit of the uncertainty band (pixels, negative).
    pub gamma_n: f64,
    /// Fuzziness of the band.
    pub sigma: f64,
}

impl Default for CloudParams {
    fn default() -> Self {
        CloudParams { gamma_p: 5.0, gamma_n: -4.0, sigma: 1.5 }
    }
}

impl CloudParams {
    pub fn validate(&self) -> Result<()> {
        if self.gamma_n < 0.0 && self.gamma_p > 0.0 && self.sigma > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(alloc::format!(
                "cloud needs gamma_n < 0 < gamma_p and sigma > 0, got {self:?}"
            )))
        }
    }

    /// Membership for one signed distance.
    pub fn membership(&self, dt: f64) -> f64 {
        if dt >= self.gamma_p {
            0.0
        } else if dt <= self.gamma_n {
            1.0
        } else {
            1.0 / (1.0 + exp(dt / self.sigma))
        }
    }
}

/// Fuzzy membership raster of one body part, cropped around its support.
#[derive(Debug, Clone, PartialEq)]
pub struct Cloud {
    pub(crate) label: Label,
    pub(crate) width: usize,
    pub(crate) height: usize,
    pub(crate) membership: Vec<f64>,
    /// Position of the crop's pixel (0, 0) in the source frame.
    pub(crate) origin: (i64, i64),
    /// Part centroid in crop coordinates.
    pub(crate) centroid: Vec2,
    /// Orientation of the part's primary axis in the source frame.
    pub(crate) angle: f64,
    pub(crate) params: CloudParams,
}

impl Cloud {
    /// Reassembles a cloud from stored parts (deserialisation).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        label: Label,
        width: usize,
        height: usize,
        membership: Vec<f64>,
        origin: (i64, i64),
        centroid: Vec2,
        angle: f64,
        params: CloudParams,
    ) -> Result<Self> {
        if membership.len() != width * height {
            return Err(Error::BadValueCount { width, height, count: membership.len() });
        }
        if membership.iter().any(|m| !(0.0..=1.0).contains(m)) {
            return Err(Error::InvalidParameter("cloud membership outside [0, 1]".into()));
        }
        params.validate()?;
        Ok(Cloud { label, width, height, membership, origin, centroid, angle, params })
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn membership(&self) -> &[f64] {
        &self.membership
    }

    pub fn origin(&self) -> (i64, i64) {
        self.origin
    }

    pub fn centroid(&self) -> Vec2 {
        self.centroid
    }

    /// Centroid in source-frame coordinates.
    pub fn frame_centroid(&self) -> Vec2 {
        self.centroid + Vec2::new(self.origin.0 as f64, self.origin.1 as f64)
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn params(&self) -> CloudParams {
        self.params
    }

    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.membership[y * self.width + x]
    }

    /// Bilinear sample at real crop coordinates; zero outside the crop.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let (fx, fy) = (floor(x), floor(y));
        let (tx, ty) = (x - fx, y - fy);
        let (x0, y0) = (fx as i64, fy as i64);
        let get = |xx: i64, yy: i64| -> f64 {
            if xx < 0 || yy < 0 || xx >= self.width as i64 || yy >= self.height as i64 {
                0.0
            } else {
                self.membership[yy as usize * self.width + xx as usize]
            }
        };
        let top = if tx == 0.0 { get(x0, y0) } else { get(x0, y0) * (1.0 - tx) + get(x0 + 1, y0) * tx };
        if ty == 0.0 {
            return top;
        }
        let bottom = if tx == 0.0 { get(x0, y0 + 1) } else { get(x0, y0 + 1) * (1.0 - tx) + get(x0 + 1, y0 + 1) * tx };
        top * (1.0 - ty) + bottom * ty
    }

    /// Crop coordinates of pixels in the uncertainty band.
    pub fn uncertainty_len(&self) -> usize {
        self.membership.iter().filter(|&&m| m > 0.0 && m < 1.0).count()
    }
}

/// Sigmoid cloud from a signed distance map, cropped to the bounding box of
/// positive membership plus a one-pixel margin.
pub fn build_cloud(dt: &DistanceMap, params: CloudParams) -> Result<Cloud> {
    params.validate()?;
    let (w, h) = (dt.width(), dt.height());
    let sd = dt.signed().values();
    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0usize, 0usize);
    let (mut sum, mut count) = (Vec2::ZERO, 0usize);
    for y in 0..h {
        for x in 0..w {
            let d = sd[y * w + x];
            if d < params.gamma_p {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
            if d <= 0.0 {
                sum += Vec2::new(x as f64, y as f64);
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::LabelAbsent(dt.label()));
    }
    let origin = (x0 as i64 - 1, y0 as i64 - 1);
    let (cw, ch) = (x1 - x0 + 3, y1 - y0 + 3);
    let mut membership = alloc::vec![0.0; cw * ch];
    for cy in 0..ch {
        for cx in 0..cw {
            let (fx, fy) = (cx as i64 + origin.0, cy as i64 + origin.1);
            if fx >= 0 && fy >= 0 && (fx as usize) < w && (fy as usize) < h {
                membership[cy * cw + cx] = params.membership(sd[fy as usize * w + fx as usize]);
            }
        }
    }
    let centroid = sum * (1.0 / count as f64) - Vec2::new(origin.0 as f64, origin.1 as f64);
    Ok(Cloud { label: dt.label(), width: cw, height: ch, membership, origin, centroid, angle: 0.0, params })
}
