use super::{lab_distance, Lab, Raster};

/// Per-pixel gradient magnitude: the largest Lab distance between a pixel and
/// any of its in-bounds 8-neighbours.
pub fn gradient_magnitude(lab: &Raster<Lab>) -> Raster<f64> {
    let mut out = Raster::filled(lab.width(), lab.height(), 0.0);
    let vals = lab.values();
    for (i, o) in out.values_mut().iter_mut().enumerate() {
        let c = &vals[i];
        *o = lab.neighbors8(i).map(|n| lab_distance(c, &vals[n])).fold(0.0, f64::max);
    }
    out
}
