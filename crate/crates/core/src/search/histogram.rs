use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::imgcore::{Raster, Rgb};

/// Default quantization: 16 bins per RGB channel.
pub const BINS_PER_CHANNEL: usize = 16;

/// Normalized colour histogram over quantized RGB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    bins: Vec<f64>,
    count: usize,
}

impl Histogram {
    /// The empty histogram with `n` bins.
    pub fn zero(n: usize) -> Self {
        Histogram { bins: vec![0.0; n], count: 0 }
    }

    /// Normalizes non-negative weights. An all-zero vector gives the empty
    /// histogram; `count` is the number of non-zero entries otherwise.
    pub fn from_weights(weights: &[f64]) -> Self {
        let total: f64 = weights.iter().filter(|w| **w > 0.0).sum();
        if !(total > 0.0) {
            return Histogram::zero(weights.len());
        }
        let bins = weights.iter().map(|&w| if w > 0.0 { w / total } else { 0.0 }).collect();
        Histogram { bins, count: weights.iter().filter(|w| **w > 0.0).count() }
    }

    /// Reassembles a stored histogram, checking that it is normalized.
    pub fn from_parts(bins: Vec<f64>, count: usize) -> crate::Result<Self> {
        let total: f64 = bins.iter().sum();
        let valid = bins.iter().all(|b| b.is_finite() && *b >= 0.0)
            && if count == 0 { total == 0.0 } else { (total - 1.0).abs() < 1e-9 };
        if !valid {
            return Err(crate::Error::InvalidParameter("histogram is not normalized".into()));
        }
        Ok(Histogram { bins, count })
    }

    pub fn bins(&self) -> &[f64] {
        &self.bins
    }

    /// Number of source pixels.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

/// Bins per channel must be a power of two between 1 and 256.
pub fn valid_bins(bins_per_channel: usize) -> bool {
    bins_per_channel.is_power_of_two() && bins_per_channel <= 256
}

/// Histogram of `pixels` (row-major indices into `frame`) with 16 bins per
/// channel; the bin of a channel value is `value >> 4`.
pub fn build_histogram(pixels: &[usize], frame: &Raster<Rgb>) -> Histogram {
    build_histogram_with(pixels, frame, BINS_PER_CHANNEL)
}

/// [`build_histogram`] with a custom per-channel bin count.
///
/// # Panics
/// If `bins_per_channel` fails [`valid_bins`].
pub fn build_histogram_with(pixels: &[usize], frame: &Raster<Rgb>, bins_per_channel: usize) -> Histogram {
    assert!(valid_bins(bins_per_channel), "bins per channel must be a power of two <= 256");
    let b = bins_per_channel;
    let shift = 8 - b.trailing_zeros();
    let mut counts = vec![0u32; b * b * b];
    let px = frame.values();
    for &p in pixels {
        let Rgb([r, g, bl]) = px[p];
        let idx = ((r as usize) >> shift) * b * b + ((g as usize) >> shift) * b + ((bl as usize) >> shift);
        counts[idx] += 1;
    }
    if pixels.is_empty() {
        return Histogram::zero(counts.len());
    }
    let n = pixels.len() as f64;
    Histogram { bins: counts.iter().map(|&c| c as f64 / n).collect(), count: pixels.len() }
}

/// Normalized χ² distance in `[0, 1]`.
///
/// One empty side gives 1 and two empty sides give 0.
///
/// # Panics
/// If the histograms have different bin layouts.
pub fn chi_square(a: &Histogram, b: &Histogram) -> f64 {
    assert_eq!(a.bins.len(), b.bins.len(), "histogram layouts differ");
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return 1.0,
        _ => {}
    }
    let mut sum = 0.0;
    for (&x, &y) in a.bins.iter().zip(&b.bins) {
        let s = x + y;
        if s > 0.0 {
            let d = x - y;
            sum += d * d / s;
        }
    }
    (0.5 * sum).clamp(0.0, 1.0)
}

/// `1 − χ²` between the histogram of `pixels` and `reference`; zero if
/// `pixels` is empty.
pub fn recognition_score(pixels: &[usize], frame: &Raster<Rgb>, reference: &Histogram) -> f64 {
    if pixels.is_empty() {
        return 0.0;
    }
    let b = icbrt(reference.bins.len());
    1.0 - chi_square(&build_histogram_with(pixels, frame, b), reference)
}

fn icbrt(n: usize) -> usize {
    let mut b = 1;
    while b * b * b < n {
        b *= 2;
    }
    b
}
