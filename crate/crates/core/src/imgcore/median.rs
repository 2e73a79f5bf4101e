use alloc::vec::Vec;

use super::{Label, Raster};

/// Mode filter over the `(2r+1)²` window clipped to the image. Ties go to the
/// smallest label.
pub fn median_filter_labels(labels: &Raster<Label>, radius: usize) -> Raster<Label> {
    let radius = radius.max(1);
    let (w, h) = (labels.width(), labels.height());
    let mut counts = [0u32; 256];
    let mut touched: Vec<Label> = Vec::with_capacity(32);
    Raster::from_fn(w, h, |x, y| {
        let (x0, x1) = (x.saturating_sub(radius), (x + radius + 1).min(w));
        let (y0, y1) = (y.saturating_sub(radius), (y + radius + 1).min(h));
        for yy in y0..y1 {
            for &l in &labels.values()[yy * w + x0..yy * w + x1] {
                if counts[l as usize] == 0 {
                    touched.push(l);
                }
                counts[l as usize] += 1;
            }
        }
        let mut best = (0u32, 0 as Label);
        for &l in &touched {
            let c = counts[l as usize];
            if c > best.0 || (c == best.0 && l < best.1) {
                best = (c, l);
            }
            counts[l as usize] = 0;
        }
        touched.clear();
        best.1
    })
}
