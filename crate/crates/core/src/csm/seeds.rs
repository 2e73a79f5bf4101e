use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::projection::Projection;
use crate::ift::SeedSet;
use crate::imgcore::{BACKGROUND, NEIGHBORS_8};
use crate::{Error, Result};

fn in_band(m: f64) -> bool {
    m > 0.0 && m < 1.0
}

fn touches_band(p: &Projection, x: usize, y: usize) -> bool {
    let (w, h) = (p.frame_width() as i64, p.frame_height() as i64);
    NEIGHBORS_8.iter().any(|&(dx, dy)| {
        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
        nx >= 0 && ny >= 0 && nx < w && ny < h && in_band(p.at(nx as usize, ny as usize))
    })
}

/// Seeds for one search group (a single part or a whole limb).
///
/// Foreground seeds of part `l` are its interior pixels touching its
/// uncertainty band; background seeds are exterior pixels touching the band.
/// A background seed is dropped wherever a sibling projection has non-zero
/// membership, so neighbouring parts of a limb do not fence each other off.
/// Seeds come out row-major.
pub fn make_seeds(projections: &[Projection]) -> Result<SeedSet> {
    let mut seeds: BTreeMap<usize, crate::Label> = BTreeMap::new();
    for p in projections {
        let r = p.rect();
        let mut found = false;
        for y in r.y0..r.y1 {
            for x in r.x0..r.x1 {
                if p.at(x, y) == 1.0 && touches_band(p, x, y) {
                    seeds.entry(y * p.frame_width() + x).or_insert(p.label());
                    found = true;
                }
            }
        }
        if !found {
            return Err(Error::NoForegroundSeeds(p.label()));
        }
    }
    for (j, p) in projections.iter().enumerate() {
        for idx in p.exterior_band() {
            let covered = projections.iter().enumerate().any(|(k, q)| k != j && q.at_index(idx) > 0.0);
            if !covered {
                seeds.entry(idx).or_insert(BACKGROUND);
            }
        }
    }
    SeedSet::new(seeds.into_iter().collect())
}

/// Sorted union of the projections' uncertainty bands.
pub fn uncertainty_domain(projections: &[Projection]) -> Vec<usize> {
    let mut out: Vec<usize> = projections.iter().flat_map(|p| p.uncertainty().into_iter().map(|(i, _)| i)).collect();
    out.sort_unstable();
    out.dedup();
    out
}
