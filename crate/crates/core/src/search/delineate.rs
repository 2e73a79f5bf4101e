use alloc::vec::Vec;

use crate::csm::{make_seeds, uncertainty_domain, Projection};
use crate::ift::{ift_sc, uncertainty_labels, IftConfig};
use crate::imgcore::{Label, Raster};
use crate::superpix::RegionMap;
use crate::Result;

/// Labels produced for one search group.
#[derive(Debug, Clone, PartialEq)]
pub struct Delineation {
    /// Interior pixels per projection, disjoint, sorted.
    pub interiors: Vec<Vec<usize>>,
    /// Delineated pixels `M_l` per projection, sorted.
    pub members: Vec<Vec<usize>>,
}

impl Delineation {
    /// Non-background `(pixel, label)` pairs for the given projections.
    pub fn labeled<'a>(&'a self, projections: &'a [Projection]) -> impl Iterator<Item = (usize, Label)> + 'a {
        self.members.iter().zip(projections).flat_map(|(m, p)| m.iter().map(move |&i| (i, p.label())))
    }
}

fn claimed(earlier: &[Vec<usize>], p: usize) -> bool {
    earlier.iter().any(|v| v.binary_search(&p).is_ok())
}

/// Delineates a group of projected clouds simultaneously.
///
/// Interior pixels keep their part's label; where interiors of the group
/// overlap, the earlier projection keeps the pixel. Superpixels wholly inside
/// an interior are therefore labeled regardless of gradient. The remaining
/// uncertainty pixels are assigned by seed competition with arcs confined to
/// single superpixels and weights from `gradient`.
pub fn delineate(
    projections: &[Projection],
    regions: &RegionMap,
    gradient: &Raster<f64>,
    eta: f64,
) -> Result<Delineation> {
    let mut interiors: Vec<Vec<usize>> = Vec::with_capacity(projections.len());
    for p in projections {
        let own: Vec<usize> = p.interior().into_iter().filter(|&i| !claimed(&interiors, i)).collect();
        interiors.push(own);
    }
    let seeds = make_seeds(projections)?;
    let domain = uncertainty_domain(projections);
    let pairs: Vec<(Label, &[usize])> =
        projections.iter().zip(&interiors).map(|(p, v)| (p.label(), v.as_slice())).collect();
    let labeled = if domain.is_empty() {
        let mut all: Vec<(usize, Label)> = pairs.iter().flat_map(|&(l, v)| v.iter().map(move |&i| (i, l))).collect();
        all.sort_unstable();
        all
    } else {
        let cfg = IftConfig { eta, domain: &domain, region_map: Some(regions.ids().values()) };
        let forest = ift_sc(gradient, &seeds, &cfg)?;
        uncertainty_labels(&forest, &pairs)?
    };
    let members = projections
        .iter()
        .map(|p| labeled.iter().filter(|e| e.1 == p.label()).map(|e| e.0).collect())
        .collect();
    Ok(Delineation { interiors, members })
}
