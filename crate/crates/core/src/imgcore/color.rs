use super::{Lab, Raster, Rgb};
use crate::math::{cbrt, powf, sqrt};

// sRGB -> XYZ (D65) rows; white point is their row sums.
const M: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];
const XN: f64 = 0.4124564 + 0.3575761 + 0.1804375;
const YN: f64 = 0.2126729 + 0.7151522 + 0.0721750;
const ZN: f64 = 0.0193339 + 0.1191920 + 0.9503041;

fn decode(c: u8) -> f64 {
    let v = c as f64 / 255.0;
    if v <= 0.04045 {
        v / 12.92
    } else {
        powf((v + 0.055) / 1.055, 2.4)
    }
}

fn lab_f(t: f64) -> f64 {
    const D: f64 = 6.0 / 29.0;
    if t > D * D * D {
        cbrt(t)
    } else {
        t / (3.0 * D * D) + 4.0 / 29.0
    }
}

fn lab_with(lin: [f64; 3]) -> Lab {
    let x = M[0][0] * lin[0] + M[0][1] * lin[1] + M[0][2] * lin[2];
    let y = M[1][0] * lin[0] + M[1][1] * lin[1] + M[1][2] * lin[2];
    let z = M[2][0] * lin[0] + M[2][1] * lin[1] + M[2][2] * lin[2];
    let (fx, fy, fz) = (lab_f(x / XN), lab_f(y / YN), lab_f(z / ZN));
    Lab { l: 116.0 * fy - 16.0, a: 500.0 * (fx - fy), b: 200.0 * (fy - fz) }
}

/// Converts one sRGB pixel to CIE Lab (D65).
pub fn rgb_to_lab(p: Rgb) -> Lab {
    lab_with([decode(p.0[0]), decode(p.0[1]), decode(p.0[2])])
}

/// Converts an sRGB raster to CIE Lab (D65).
pub fn to_lab(rgb: &Raster<Rgb>) -> Raster<Lab> {
    let mut lut = [0.0f64; 256];
    for (i, v) in lut.iter_mut().enumerate() {
        *v = decode(i as u8);
    }
    rgb.map(|p| lab_with([lut[p.0[0] as usize], lut[p.0[1] as usize], lut[p.0[2] as usize]]))
}

/// Euclidean distance in Lab space.
#[inline]
pub fn lab_distance(a: &Lab, b: &Lab) -> f64 {
    let (dl, da, db) = (a.l - b.l, a.a - b.a, a.b - b.b);
    sqrt(dl * dl + da * da + db * db)
}
