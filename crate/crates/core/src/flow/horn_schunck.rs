use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::imgcore::{Lab, Raster};
use crate::math::{floor, Vec2};
use crate::{Error, Result};

/// Per-pixel displacement from the first frame to the second.
pub type FlowField = Raster<Vec2>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowConfig {
    /// Smoothness weight.
    pub alpha: f64,
    /// Fixed-point iterations per pyramid level.
    pub iterations: usize,
    /// Grey levels per unit of Lab lightness (L spans 0..100).
    pub intensity_scale: f64,
    /// Coarsest level keeps both sides at least this long.
    pub min_level_size: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig { alpha: 15.0, iterations: 100, intensity_scale: 2.55, min_level_size: 16 }
    }
}

#[derive(Clone)]
struct Plane {
    w: usize,
    h: usize,
    v: Vec<f64>,
}

impl Plane {
    fn at(&self, x: i64, y: i64) -> f64 {
        let xc = x.clamp(0, self.w as i64 - 1) as usize;
        let yc = y.clamp(0, self.h as i64 - 1) as usize;
        self.v[yc * self.w + xc]
    }

    fn bilinear(&self, x: f64, y: f64) -> f64 {
        let (fx, fy) = (floor(x), floor(y));
        let (tx, ty) = (x - fx, y - fy);
        let (x0, y0) = (fx as i64, fy as i64);
        let top = self.at(x0, y0) * (1.0 - tx) + self.at(x0 + 1, y0) * tx;
        let bottom = self.at(x0, y0 + 1) * (1.0 - tx) + self.at(x0 + 1, y0 + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }

    /// Binomial blur then 2× decimation.
    fn reduce(&self) -> Plane {
        const K: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];
        let mut tmp = vec![0.0; self.w * self.h];
        for y in 0..self.h {
            for x in 0..self.w {
                tmp[y * self.w + x] = (0..5).map(|k| K[k] * self.at(x as i64 + k as i64 - 2, y as i64)).sum();
            }
        }
        let t = Plane { w: self.w, h: self.h, v: tmp };
        let (w2, h2) = (self.w.div_ceil(2), self.h.div_ceil(2));
        let mut v = Vec::with_capacity(w2 * h2);
        for y in 0..h2 {
            for x in 0..w2 {
                v.push((0..5).map(|k| K[k] * t.at(2 * x as i64, 2 * y as i64 + k as i64 - 2)).sum());
            }
        }
        Plane { w: w2, h: h2, v }
    }
}

/// Horn–Schunck neighbourhood average (1/6 edge, 1/12 corner neighbours).
fn local_mean(p: &Plane, x: usize, y: usize) -> f64 {
    let (x, y) = (x as i64, y as i64);
    (p.at(x - 1, y) + p.at(x + 1, y) + p.at(x, y - 1) + p.at(x, y + 1)) / 6.0
        + (p.at(x - 1, y - 1) + p.at(x + 1, y - 1) + p.at(x - 1, y + 1) + p.at(x + 1, y + 1)) / 12.0
}

/// Refines `(u, v)` at one level: warp `b` by the current flow once, then run
/// the fixed-point iterations on the linearised brightness constraint.
fn refine(a: &Plane, b: &Plane, u: &mut Plane, v: &mut Plane, cfg: &FlowConfig) {
    let (w, h) = (a.w, a.h);
    let warped: Vec<f64> =
        (0..w * h).map(|i| b.bilinear((i % w) as f64 + u.v[i], (i / w) as f64 + v.v[i])).collect();
    let bw = Plane { w, h, v: warped };
    let (mut ix, mut iy, mut it) = (vec![0.0; w * h], vec![0.0; w * h], vec![0.0; w * h]);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w + x as usize;
            ix[i] = 0.25 * (a.at(x + 1, y) - a.at(x - 1, y) + bw.at(x + 1, y) - bw.at(x - 1, y));
            iy[i] = 0.25 * (a.at(x, y + 1) - a.at(x, y - 1) + bw.at(x, y + 1) - bw.at(x, y - 1));
            it[i] = bw.v[i] - a.v[i];
        }
    }
    let (u0, v0) = (u.v.clone(), v.v.clone());
    let a2 = cfg.alpha * cfg.alpha;
    let (mut nu, mut nv) = (vec![0.0; w * h], vec![0.0; w * h]);
    for _ in 0..cfg.iterations {
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                let (ub, vb) = (local_mean(u, x, y), local_mean(v, x, y));
                let r = (ix[i] * (ub - u0[i]) + iy[i] * (vb - v0[i]) + it[i]) / (a2 + ix[i] * ix[i] + iy[i] * iy[i]);
                nu[i] = ub - ix[i] * r;
                nv[i] = vb - iy[i] * r;
            }
        }
        core::mem::swap(&mut u.v, &mut nu);
        core::mem::swap(&mut v.v, &mut nv);
    }
}

/// Pyramidal Horn–Schunck flow from `a` to `b` on scaled Lab lightness.
pub fn dense_flow(a: &Raster<Lab>, b: &Raster<Lab>, cfg: &FlowConfig) -> Result<FlowField> {
    a.check_same_size(b)?;
    if !(cfg.alpha > 0.0 && cfg.intensity_scale > 0.0) {
        return Err(Error::InvalidParameter("flow needs alpha > 0 and intensity_scale > 0".into()));
    }
    let (w, h) = (a.width(), a.height());
    if w == 0 || h == 0 {
        return Ok(Raster::filled(w, h, Vec2::ZERO));
    }
    let plane = |r: &Raster<Lab>| Plane { w, h, v: r.values().iter().map(|p| p.l * cfg.intensity_scale).collect() };
    let mut pa = vec![plane(a)];
    let mut pb = vec![plane(b)];
    let min_size = cfg.min_level_size.max(2);
    while pa.len() < 3 || pa.last().is_some_and(|p| p.w.min(p.h) / 2 >= min_size) {
        let top = pa.last().expect("non-empty");
        if top.w.min(top.h) < 2 {
            break;
        }
        let (na, nb) = (top.reduce(), pb.last().expect("non-empty").reduce());
        pa.push(na);
        pb.push(nb);
    }
    let coarsest = pa.last().expect("non-empty");
    let mut u = Plane { w: coarsest.w, h: coarsest.h, v: vec![0.0; coarsest.w * coarsest.h] };
    let mut v = u.clone();
    for level in (0..pa.len()).rev() {
        let (la, lb) = (&pa[level], &pb[level]);
        if u.w != la.w || u.h != la.h {
            let up = |p: &Plane| Plane {
                w: la.w,
                h: la.h,
                v: (0..la.w * la.h)
                    .map(|i| 2.0 * p.bilinear(((i % la.w) as f64 - 0.5) * 0.5, ((i / la.w) as f64 - 0.5) * 0.5))
                    .collect(),
            };
            u = up(&u);
            v = up(&v);
        }
        refine(la, lb, &mut u, &mut v, cfg);
    }
    Raster::from_vec(w, h, u.v.iter().zip(&v.v).map(|(&dx, &dy)| Vec2::new(dx, dy)).collect())
}
