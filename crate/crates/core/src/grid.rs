//! Pixel grids and row-major real images.

use std::fmt;

use crate::error::{Error, Result};

/// Extent of the high-resolution pixel grid.
///
/// Pixel centers sit at integer coordinates `(x, y)` with `x ∈ 1..=width`
/// and `y ∈ 1..=height`; the y axis points down. Linear pixel indices are
/// row-major: `m = (y - 1) * width + (x - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PixelGrid {
    width: usize,
    height: usize,
}

impl PixelGrid {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param(
                "grid",
                format!("extent must be at least 1x1, got {width}x{height}"),
            ));
        }
        if width
            .checked_mul(height)
            .is_none_or(|m| m > u32::MAX as usize)
        {
            return Err(Error::param("grid", "pixel count exceeds u32 range"));
        }
        Ok(Self { width, height })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Total pixel count `M`.
    #[inline]
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// One-based pixel-center coordinates of linear index `m`.
    #[inline]
    pub fn coords(&self, m: usize) -> (usize, usize) {
        (m % self.width + 1, m / self.width + 1)
    }

    /// Largest distance from `(cx, cy)` to any of the four corner pixel centers.
    pub fn farthest_corner_distance(&self, cx: f64, cy: f64) -> f64 {
        let (w, h) = (self.width as f64, self.height as f64);
        [(1.0, 1.0), (w, 1.0), (1.0, h), (w, h)]
            .iter()
            .map(|&(x, y)| ((x - cx) * (x - cx) + (y - cy) * (y - cy)).sqrt())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for PixelGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// A real-valued image over a [`PixelGrid`], stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    grid: PixelGrid,
    data: Vec<f64>,
}

impl Image {
    pub fn zeros(grid: PixelGrid) -> Self {
        Self::filled(grid, 0.0)
    }

    pub fn filled(grid: PixelGrid, value: f64) -> Self {
        Self {
            grid,
            data: vec![value; grid.len()],
        }
    }

    pub fn from_vec(grid: PixelGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::dims(
                format!("{} pixels ({grid})", grid.len()),
                format!("{} values", data.len()),
            ));
        }
        Ok(Self { grid, data })
    }

    pub fn from_fn(grid: PixelGrid, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let data = (0..grid.len())
            .map(|m| {
                let (x, y) = grid.coords(m);
                f(x, y)
            })
            .collect();
        Self { grid, data }
    }

    #[inline]
    pub fn grid(&self) -> PixelGrid {
        self.grid
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.grid.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.grid.height
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Value at one-based coordinates.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[(y - 1) * self.grid.width + (x - 1)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[(y - 1) * self.grid.width + (x - 1)] = value;
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub(crate) fn check_grid(&self, grid: PixelGrid) -> Result<()> {
        if self.grid != grid {
            return Err(Error::dims(grid, self.grid));
        }
        Ok(())
    }
}
