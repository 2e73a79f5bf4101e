use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result};

/// 8-neighbourhood offsets `(dx, dy)` in row-major order.
pub const NEIGHBORS_8: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Row-major grid of values addressed by `(x, y)` with `y` growing downwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster<V> {
    width: usize,
    height: usize,
    values: Vec<V>,
}

impl<V> Raster<V> {
    pub fn from_vec(width: usize, height: usize, values: Vec<V>) -> Result<Self> {
        if width.checked_mul(height) != Some(values.len()) {
            return Err(Error::BadValueCount { width, height, count: values.len() });
        }
        Ok(Raster { width, height, values })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> V) -> Self {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Raster { width, height, values }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [V] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<V> {
        self.values
    }

    #[inline]
    pub fn index_of(&self, x: usize, y: usize) -> usize {
        assert!(x < self.width && y < self.height, "pixel ({x}, {y}) out of bounds");
        y * self.width + x
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.width, idx / self.width)
    }

    #[inline]
    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    /// Bounds-checked access with signed coordinates.
    #[inline]
    pub fn get(&self, x: i64, y: i64) -> Option<&V> {
        if self.contains(x, y) {
            Some(&self.values[y as usize * self.width + x as usize])
        } else {
            None
        }
    }

    pub fn same_size<W>(&self, other: &Raster<W>) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn check_same_size<W>(&self, other: &Raster<W>) -> Result<()> {
        if self.same_size(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(self.width, self.height, other.width, other.height))
        }
    }

    pub fn map<W>(&self, f: impl FnMut(&V) -> W) -> Raster<W> {
        Raster { width: self.width, height: self.height, values: self.values.iter().map(f).collect() }
    }

    /// In-bounds 8-neighbours of pixel `idx`, row-major order.
    pub fn neighbors8(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (x, y) = self.coords(idx);
        let (w, h) = (self.width as i64, self.height as i64);
        NEIGHBORS_8.iter().filter_map(move |&(dx, dy)| {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if nx >= 0 && ny >= 0 && nx < w && ny < h {
                Some(ny as usize * self.width + nx as usize)
            } else {
                None
            }
        })
    }
}

impl<V: Clone> Raster<V> {
    pub fn filled(width: usize, height: usize, value: V) -> Self {
        Raster { width, height, values: alloc::vec![value; width * height] }
    }
}

impl<V> Index<(usize, usize)> for Raster<V> {
    type Output = V;
    fn index(&self, (x, y): (usize, usize)) -> &V {
        let i = self.index_of(x, y);
        &self.values[i]
    }
}

impl<V> IndexMut<(usize, usize)> for Raster<V> {
    fn index_mut(&mut self, (x, y): (usize, usize)) -> &mut V {
        let i = self.index_of(x, y);
        &mut self.values[i]
    }
}

/// Half-open pixel rectangle `[x0, x1) × [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelRect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl PixelRect {
    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }

    pub fn is_empty(&self) -> bool {
        self.x1 <= self.x0 || self.y1 <= self.y0
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    /// Smallest rectangle covering both.
    pub fn union(&self, o: &PixelRect) -> PixelRect {
        if self.is_empty() {
            return *o;
        }
        if o.is_empty() {
            return *self;
        }
        PixelRect {
            x0: self.x0.min(o.x0),
            y0: self.y0.min(o.y0),
            x1: self.x1.max(o.x1),
            y1: self.y1.max(o.y1),
        }
    }
}
