use alloc::vec::Vec;

use super::Raster;
use crate::{Error, Result};

/// Zhang–Suen thinning of a binary mask.
///
/// Returns the surviving pixel coordinates in row-major order. The result is
/// at most two pixels wide, stays inside the mask and follows the medial
/// axis of elongated shapes.
pub fn morph_skeleton(mask: &Raster<bool>) -> Result<Vec<(usize, usize)>> {
    if !mask.values().iter().any(|&b| b) {
        return Err(Error::EmptyMask);
    }
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let mut img: Vec<bool> = mask.values().to_vec();
    let at = |img: &[bool], x: i64, y: i64| -> bool {
        x >= 0 && y >= 0 && x < w && y < h && img[(y * w + x) as usize]
    };
    let mut doomed = Vec::new();
    loop {
        let mut changed = false;
        for step in 0..2 {
            doomed.clear();
            for y in 0..h {
                for x in 0..w {
                    if !img[(y * w + x) as usize] {
                        continue;
                    }
                    // P2..P9 clockwise from north.
                    let p = [
                        at(&img, x, y - 1),
                        at(&img, x + 1, y - 1),
                        at(&img, x + 1, y),
                        at(&img, x + 1, y + 1),
                        at(&img, x, y + 1),
                        at(&img, x - 1, y + 1),
                        at(&img, x - 1, y),
                        at(&img, x - 1, y - 1),
                    ];
                    let b = p.iter().filter(|&&v| v).count();
                    if !(2..=6).contains(&b) {
                        continue;
                    }
                    let a = (0..8).filter(|&i| !p[i] && p[(i + 1) % 8]).count();
                    if a != 1 {
                        continue;
                    }
                    let (p2, p4, p6, p8) = (p[0], p[2], p[4], p[6]);
                    let keep = if step == 0 {
                        (p2 && p4 && p6) || (p4 && p6 && p8)
                    } else {
                        (p2 && p4 && p8) || (p2 && p6 && p8)
                    };
                    if !keep {
                        doomed.push((y * w + x) as usize);
                    }
                }
            }
            for &i in &doomed {
                img[i] = false;
            }
            changed |= !doomed.is_empty();
        }
        if !changed {
            break;
        }
    }
    Ok(img
        .iter()
        .enumerate()
        .filter(|(_, &v)| v)
        .map(|(i, _)| (i % w as usize, i / w as usize))
        .collect())
}
