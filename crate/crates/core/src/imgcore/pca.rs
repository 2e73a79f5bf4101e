use crate::math::{abs, atan2, sqrt, Vec2};
use crate::{Error, Result};

/// Principal axes of a 2D point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientationFrame {
    pub centroid: Vec2,
    /// Unit vector with `y <= 0` (and `x > 0` when `y == 0`).
    pub primary_axis: Vec2,
    /// `primary_axis` rotated by +90°.
    pub secondary_axis: Vec2,
    pub primary_sd: f64,
    pub secondary_sd: f64,
}

impl OrientationFrame {
    /// Angle of the primary axis in image coordinates, in `(-π, 0]`.
    pub fn angle(&self) -> f64 {
        self.primary_axis.angle()
    }
}

/// PCA of a coordinate set (population covariance).
///
/// Collinear inputs are accepted and yield `secondary_sd == 0`.
pub fn pca_orientation(coords: &[Vec2]) -> Result<OrientationFrame> {
    let first = *coords.first().ok_or(Error::TooFewPoints(0))?;
    if coords.iter().all(|&p| p == first) {
        return Err(Error::TooFewPoints(1));
    }
    let n = coords.len() as f64;
    let mut mean = Vec2::ZERO;
    for &p in coords {
        mean += p;
    }
    let mean = mean * (1.0 / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &p in coords {
        let d = p - mean;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    let (a, b, c) = (sxx / n, sxy / n, syy / n);
    let half_trace = 0.5 * (a + c);
    let r = sqrt(0.25 * (a - c) * (a - c) + b * b);
    let (l1, l2) = (half_trace + r, (half_trace - r).max(0.0));
    let theta = 0.5 * atan2(2.0 * b, a - c);
    let mut axis = Vec2::from_angle(theta);
    if axis.y > 0.0 || (abs(axis.y) < 1e-12 && axis.x < 0.0) {
        axis = -axis;
    }
    if abs(axis.y) < 1e-12 {
        axis = Vec2::new(1.0, 0.0);
    }
    Ok(OrientationFrame {
        centroid: mean,
        primary_axis: axis,
        secondary_axis: axis.perp(),
        primary_sd: sqrt(l1),
        secondary_sd: sqrt(l2),
    })
}
