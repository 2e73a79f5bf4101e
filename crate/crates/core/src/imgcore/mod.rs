//! Pixel-level substrate: rasters and the per-pixel operators every other
//! module consumes.

mod color;
mod edt;
mod gradient;
mod median;
mod pca;
mod raster;
mod thinning;

pub use color::{lab_distance, rgb_to_lab, to_lab};
pub use edt::{signed_edt, DistanceMap};
pub use gradient::gradient_magnitude;
pub use median::median_filter_labels;
pub use pca::{pca_orientation, OrientationFrame};
pub use raster::{PixelRect, Raster, NEIGHBORS_8};
pub use thinning::morph_skeleton;

use serde::{Deserialize, Serialize};

/// Integer body-part label; `0` is background.
pub type Label = u8;

/// Background label.
pub const BACKGROUND: Label = 0;

/// 8-bit sRGB pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Rgb(pub [u8; 3]);

/// CIE Lab pixel (D65).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Lab {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}
