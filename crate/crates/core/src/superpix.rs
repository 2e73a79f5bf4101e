//! Per-frame superpixels by graph-based agglomeration (Felzenszwalb and
//! Huttenlocher predicate) on the 8-adjacency graph with Lab edge weights.

use alloc::vec;
use alloc::vec::Vec;

use crate::imgcore::{lab_distance, Lab, Raster};

/// Dense superpixel labeling.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    ids: Raster<u32>,
    sizes: Vec<usize>,
    mean_colors: Vec<Lab>,
}

impl RegionMap {
    pub fn ids(&self) -> &Raster<u32> {
        &self.ids
    }

    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn mean_colors(&self) -> &[Lab] {
        &self.mean_colors
    }

    pub fn id(&self, p: usize) -> u32 {
        self.ids.values()[p]
    }
}

struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
    internal: Vec<f64>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n as u32).collect(), size: vec![1; n], internal: vec![0.0; n] }
    }

    fn find(&mut self, mut a: u32) -> u32 {
        let mut r = a;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        while self.parent[a as usize] != r {
            let next = self.parent[a as usize];
            self.parent[a as usize] = r;
            a = next;
        }
        r
    }

    fn union(&mut self, a: u32, b: u32, w: f64) {
        let (big, small) = if self.size[a as usize] >= self.size[b as usize] { (a, b) } else { (b, a) };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        self.internal[big as usize] = w;
    }
}

/// Graph-based oversegmentation with merge scale `k` and minimum region size.
///
/// Edges are sorted stably by weight with ties in pixel-index order, so the
/// result is deterministic. Regions smaller than `min_size` are absorbed along
/// their lowest-weight boundary edge.
pub fn segment_superpixels(image: &Raster<Lab>, k: f64, min_size: usize) -> RegionMap {
    let (w, h) = (image.width(), image.height());
    let n = w * h;
    let px = image.values();
    let mut edges: Vec<(f64, u32, u32)> = Vec::with_capacity(4 * n);
    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            let mut push = |q: usize| edges.push((lab_distance(&px[p], &px[q]), p as u32, q as u32));
            if x + 1 < w {
                push(p + 1);
            }
            if y + 1 < h {
                if x > 0 {
                    push(p + w - 1);
                }
                push(p + w);
                if x + 1 < w {
                    push(p + w + 1);
                }
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut sets = DisjointSets::new(n);
    for &(wt, a, b) in &edges {
        let (ra, rb) = (sets.find(a), sets.find(b));
        if ra == rb {
            continue;
        }
        let ta = sets.internal[ra as usize] + k / sets.size[ra as usize] as f64;
        let tb = sets.internal[rb as usize] + k / sets.size[rb as usize] as f64;
        if wt <= ta.min(tb) {
            sets.union(ra, rb, wt);
        }
    }
    let min_size = min_size.max(1) as u32;
    for &(wt, a, b) in &edges {
        let (ra, rb) = (sets.find(a), sets.find(b));
        if ra != rb && (sets.size[ra as usize] < min_size || sets.size[rb as usize] < min_size) {
            let keep = sets.internal[ra as usize].max(sets.internal[rb as usize]).max(wt);
            sets.union(ra, rb, keep);
        }
    }

    let mut dense = vec![u32::MAX; n];
    let mut ids = Vec::with_capacity(n);
    let mut sizes = Vec::new();
    let mut sums: Vec<[f64; 3]> = Vec::new();
    for p in 0..n {
        let r = sets.find(p as u32) as usize;
        if dense[r] == u32::MAX {
            dense[r] = sizes.len() as u32;
            sizes.push(0);
            sums.push([0.0; 3]);
        }
        let id = dense[r];
        ids.push(id);
        sizes[id as usize] += 1;
        let s = &mut sums[id as usize];
        s[0] += px[p].l;
        s[1] += px[p].a;
        s[2] += px[p].b;
    }
    let mean_colors = sums
        .iter()
        .zip(&sizes)
        .map(|(s, &c)| {
            let c = c as f64;
            Lab { l: s[0] / c, a: s[1] / c, b: s[2] / c }
        })
        .collect();
    RegionMap { ids: Raster::from_vec(w, h, ids).expect("sized"), sizes, mean_colors }
}
