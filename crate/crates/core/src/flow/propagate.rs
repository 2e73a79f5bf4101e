use alloc::vec;

use super::horn_schunck::FlowField;
use crate::imgcore::{median_filter_labels, Label, Raster, BACKGROUND};
use crate::math::round;
use crate::Result;

/// Radius of the mode filter applied after splatting.
const FILTER_RADIUS: usize = 2;
/// Unreached pixels with at least this many reached 8-neighbours are filled.
const FILL_MIN_NEIGHBOURS: usize = 5;

/// Forward-splats part labels along the flow.
///
/// Every part pixel lands at the rounded end of its flow vector. When two
/// sources collide, the faster one wins, so moving foreground covers what it
/// passes over. Unreached pixels surrounded by reached ones take the most
/// frequent reached label, and a mode filter cleans up the result.
pub fn propagate_labels(labels: &Raster<Label>, flow: &FlowField) -> Result<Raster<Label>> {
    labels.check_same_size(flow)?;
    let (w, h) = (labels.width(), labels.height());
    let mut out = vec![BACKGROUND; w * h];
    let mut best = vec![-1.0f64; w * h];
    for (i, &l) in labels.values().iter().enumerate() {
        if l == BACKGROUND {
            continue;
        }
        let d = flow.values()[i];
        let (tx, ty) = (round((i % w) as f64 + d.x), round((i / w) as f64 + d.y));
        if !(tx >= 0.0 && ty >= 0.0 && tx < w as f64 && ty < h as f64) {
            continue;
        }
        let t = ty as usize * w + tx as usize;
        let mag = d.norm();
        if mag > best[t] {
            best[t] = mag;
            out[t] = l;
        }
    }
    let hit = Raster::from_vec(w, h, best.iter().map(|&b| b >= 0.0).collect::<alloc::vec::Vec<bool>>())?;
    let mut filled = out.clone();
    let mut counts = [0usize; 256];
    for i in 0..w * h {
        if hit.values()[i] {
            continue;
        }
        counts.iter_mut().for_each(|c| *c = 0);
        let mut reached = 0;
        for n in hit.neighbors8(i) {
            if hit.values()[n] {
                reached += 1;
                counts[out[n] as usize] += 1;
            }
        }
        if reached >= FILL_MIN_NEIGHBOURS {
            let (mut lab, mut most) = (BACKGROUND, 0);
            for (l, &c) in counts.iter().enumerate() {
                if c > most {
                    most = c;
                    lab = l as Label;
                }
            }
            filled[i] = lab;
        }
    }
    Ok(median_filter_labels(&Raster::from_vec(w, h, filled)?, FILTER_RADIUS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Vec2;

    fn stripes() -> Raster<Label> {
        Raster::from_fn(30, 20, |x, _| match x {
            0..=9 => 0,
            10..=19 => 1,
            _ => 2,
        })
    }

    #[test]
    fn zero_flow_keeps_labels() {
        let labels = stripes();
        assert_eq!(median_filter_labels(&labels, 2), labels);
        let out = propagate_labels(&labels, &Raster::filled(30, 20, Vec2::ZERO)).unwrap();
        assert_eq!(out, labels);
    }

    #[test]
    fn uniform_flow_translates() {
        let labels = Raster::from_fn(40, 30, |x, y| u8::from((10..22).contains(&x) && (8..22).contains(&y)) * 3);
        let out = propagate_labels(&labels, &Raster::filled(40, 30, Vec2::new(3.0, 0.0))).unwrap();
        // Interior pixels (away from the mode filter's corner rounding) are exact.
        for y in 10..20 {
            for x in 0..40 {
                let expected = if (13..25).contains(&x) { 3 } else { 0 };
                assert_eq!(out[(x, y)], expected, "({x}, {y})");
            }
        }
    }

    #[test]
    fn parts_moving_apart_keep_their_displacement() {
        let labels = Raster::from_fn(60, 30, |x, y| {
            if (8..18).contains(&x) && (8..20).contains(&y) {
                1
            } else if (30..42).contains(&x) && (8..20).contains(&y) {
                2
            } else {
                0
            }
        });
        let flow = Raster::from_fn(60, 30, |x, _| if x < 24 { Vec2::new(-2.0, 1.0) } else { Vec2::new(4.0, -1.0) });
        let out = propagate_labels(&labels, &flow).unwrap();
        let centroid = |r: &Raster<Label>, l: Label| {
            let (mut s, mut n) = (Vec2::ZERO, 0.0);
            for y in 0..r.height() {
                for x in 0..r.width() {
                    if r[(x, y)] == l {
                        s += Vec2::new(x as f64, y as f64);
                        n += 1.0;
                    }
                }
            }
            s * (1.0 / n)
        };
        for (l, m) in [(1, Vec2::new(-2.0, 1.0)), (2, Vec2::new(4.0, -1.0))] {
            let moved = centroid(&out, l) - centroid(&labels, l);
            assert!(moved.distance(m) <= 0.5, "part {l}: {moved:?}");
        }
    }

    #[test]
    fn faster_source_wins_collisions() {
        // Part 1 slides 8 px right onto the static part 2.
        let labels = Raster::from_fn(30, 12, |x, _| match x {
            2..=9 => 1,
            10..=17 => 2,
            _ => 0,
        });
        let flow = Raster::from_fn(30, 12, |x, _| if x < 10 { Vec2::new(8.0, 0.0) } else { Vec2::ZERO });
        let out = propagate_labels(&labels, &flow).unwrap();
        for x in 10..18 {
            assert_eq!(out[(x, 6)], 1, "x = {x}");
        }
    }

    #[test]
    fn small_motion_never_loses_a_part() {
        let labels = Raster::from_fn(50, 40, |x, y| {
            if (5..15).contains(&x) && (5..35).contains(&y) {
                1
            } else if (20..28).contains(&x) && (10..18).contains(&y) {
                2
            } else {
                0
            }
        });
        for k in 0..8 {
            let d = Vec2::from_angle(k as f64 * 0.8) * 3.0;
            let out = propagate_labels(&labels, &Raster::filled(50, 40, d)).unwrap();
            assert!(out.values().contains(&1) && out.values().contains(&2));
        }
    }
}
