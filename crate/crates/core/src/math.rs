//! Small geometry helpers over `libm` so the crate stays `no_std`.

use core::f64::consts::PI;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}
#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}
#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}
#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}
#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x.clamp(-1.0, 1.0))
}
#[inline]
pub fn cbrt(x: f64) -> f64 {
    libm::cbrt(x)
}

pub fn to_radians(deg: f64) -> f64 {
    deg * PI / 180.0
}

pub fn to_degrees(rad: f64) -> f64 {
    rad * 180.0 / PI
}

/// Wraps an angle into `(-π, π]`.
pub fn normalize_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = a - two_pi * floor(a / two_pi);
    // r in [0, 2π)
    if r > PI {
        r -= two_pi;
    }
    r
}

/// Median of a slice (mean of the two middle values for even lengths).
/// Returns `None` on empty input. Sorts in place.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// A 2D vector in image coordinates (x right, y down).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at angle `a` (radians, measured from +x towards +y).
    pub fn from_angle(a: f64) -> Self {
        Vec2::new(libm::cos(a), libm::sin(a))
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        sqrt(self.dot(self))
    }

    pub fn angle(self) -> f64 {
        atan2(self.y, self.x)
    }

    /// Rotates by `a` radians.
    pub fn rotate(self, a: f64) -> Self {
        let (s, c) = (libm::sin(a), libm::cos(a));
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Perpendicular obtained by a +90° rotation.
    pub fn perp(self) -> Self {
        Vec2::new(-self.y, self.x)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A local frame: primary axis at angle `angle`, secondary axis at
/// `angle + 90°`. Maps local `(u, v)` coordinates to image offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame2 {
    pub cos: f64,
    pub sin: f64,
}

impl Frame2 {
    pub fn new(angle: f64) -> Self {
        Frame2 { cos: libm::cos(angle), sin: libm::sin(angle) }
    }

    /// Local `(u, v)` to image offset.
    pub fn to_image(&self, local: Vec2) -> Vec2 {
        Vec2::new(
            self.cos * local.x - self.sin * local.y,
            self.sin * local.x + self.cos * local.y,
        )
    }

    /// Image offset to local `(u, v)`.
    pub fn to_local(&self, offset: Vec2) -> Vec2 {
        Vec2::new(
            self.cos * offset.x + self.sin * offset.y,
            -self.sin * offset.x + self.cos * offset.y,
        )
    }
}
