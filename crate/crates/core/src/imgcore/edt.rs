use alloc::vec;
use alloc::vec::Vec;

use super::{Label, Raster, NEIGHBORS_8};
use crate::math::sqrt;
use crate::{Error, Result};

/// Exact signed Euclidean distance to the border of one label.
///
/// Border pixels (pixels of the label with an 8-neighbour of another label or
/// outside the image) hold `0`; remaining pixels of the label are negative,
/// everything else positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    label: Label,
    squared: Raster<u64>,
    signed: Raster<f64>,
}

impl DistanceMap {
    pub fn label(&self) -> Label {
        self.label
    }

    pub fn width(&self) -> usize {
        self.signed.width()
    }

    pub fn height(&self) -> usize {
        self.signed.height()
    }

    /// Signed distances.
    pub fn signed(&self) -> &Raster<f64> {
        &self.signed
    }

    /// Unsigned squared distances in integer pixel units.
    pub fn squared(&self) -> &Raster<u64> {
        &self.squared
    }

    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.signed[(x, y)]
    }
}

fn is_border(labels: &Raster<Label>, x: usize, y: usize, l: Label) -> bool {
    labels[(x, y)] == l
        && NEIGHBORS_8
            .iter()
            .any(|&(dx, dy)| labels.get(x as i64 + dx, y as i64 + dy) != Some(&l))
}

/// Squared distance along one line to the nearest site, via the lower
/// envelope of parabolas rooted at the finite entries of `f`.
fn envelope_1d(f: &[u64], out: &mut [u64], sites: &mut Vec<usize>, bounds: &mut Vec<f64>) {
    sites.clear();
    bounds.clear();
    for (q, &fq) in f.iter().enumerate() {
        if fq == u64::MAX {
            continue;
        }
        let hq = fq as f64 + (q * q) as f64;
        loop {
            match sites.last() {
                None => {
                    sites.push(q);
                    bounds.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&v) => {
                    let hv = f[v] as f64 + (v * v) as f64;
                    let s = (hq - hv) / (2.0 * (q - v) as f64);
                    if s <= *bounds.last().unwrap() {
                        sites.pop();
                        bounds.pop();
                    } else {
                        sites.push(q);
                        bounds.push(s);
                        break;
                    }
                }
            }
        }
    }
    if sites.is_empty() {
        out.iter_mut().for_each(|o| *o = u64::MAX);
        return;
    }
    let mut k = 0;
    for (x, o) in out.iter_mut().enumerate() {
        while k + 1 < sites.len() && bounds[k + 1] < x as f64 {
            k += 1;
        }
        let v = sites[k];
        let d = x.abs_diff(v) as u64;
        *o = d * d + f[v];
    }
}

/// Signed EDT of the border of part `l`.
pub fn signed_edt(labels: &Raster<Label>, l: Label) -> Result<DistanceMap> {
    let (w, h) = (labels.width(), labels.height());
    if !labels.values().contains(&l) {
        return Err(Error::LabelAbsent(l));
    }
    let border: Vec<bool> = (0..w * h).map(|i| is_border(labels, i % w, i / w, l)).collect();
    // Column pass: squared vertical distance to the nearest border site.
    let mut col = vec![u64::MAX; w * h];
    for x in 0..w {
        let mut last: Option<usize> = None;
        for y in 0..h {
            if border[y * w + x] {
                last = Some(y);
            }
            if let Some(s) = last {
                let d = (y - s) as u64;
                col[y * w + x] = d * d;
            }
        }
        let mut next: Option<usize> = None;
        for y in (0..h).rev() {
            if border[y * w + x] {
                next = Some(y);
            }
            if let Some(s) = next {
                let d = (s - y) as u64;
                let i = y * w + x;
                col[i] = col[i].min(d * d);
            }
        }
    }
    // Row pass.
    let mut squared = vec![0u64; w * h];
    let (mut sites, mut bounds) = (Vec::new(), Vec::new());
    for y in 0..h {
        envelope_1d(&col[y * w..(y + 1) * w], &mut squared[y * w..(y + 1) * w], &mut sites, &mut bounds);
    }
    let signed: Vec<f64> = squared
        .iter()
        .zip(labels.values())
        .map(|(&d2, &lab)| {
            let d = sqrt(d2 as f64);
            if lab == l {
                -d
            } else {
                d
            }
        })
        .collect();
    Ok(DistanceMap {
        label: l,
        squared: Raster::from_vec(w, h, squared)?,
        signed: Raster::from_vec(w, h, signed)?,
    })
}
