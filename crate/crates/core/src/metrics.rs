//! Image quality metrics restricted to a region of interest, and the
//! redundancy arithmetic of foveated layouts.

use crate::error::{Error, Result};
use crate::geometry::CellLayout;
use crate::grid::{Image, PixelGrid};

/// Fraction of pixel-level degrees of freedom removed by a layout with
/// `cells` cells over `pixels` pixels: `(M - N) / M`.
pub fn redundancy_reduction(pixels: usize, cells: usize) -> Result<f64> {
    if pixels == 0 || cells > pixels {
        return Err(Error::param(
            "cells",
            format!("{cells} cells cannot partition {pixels} pixels"),
        ));
    }
    Ok((pixels - cells) as f64 / pixels as f64)
}

/// Boolean pixel mask selecting the region where metrics are evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiMask {
    grid: PixelGrid,
    mask: Vec<bool>,
    note: String,
}

impl RoiMask {
    pub fn new(grid: PixelGrid, mask: Vec<bool>, note: impl Into<String>) -> Result<Self> {
        if mask.len() != grid.len() {
            return Err(Error::dims(grid.len(), mask.len()));
        }
        if !mask.contains(&true) {
            return Err(Error::Mask("selects no pixel".into()));
        }
        Ok(Self {
            grid,
            mask,
            note: note.into(),
        })
    }

    pub fn full(grid: PixelGrid) -> Self {
        Self {
            grid,
            mask: vec![true; grid.len()],
            note: "full frame".into(),
        }
    }

    /// Pixels of the layout's fovea cells.
    pub fn from_fovea(layout: &CellLayout) -> Result<Self> {
        let mask = (0..layout.grid().len())
            .map(|m| layout.is_fovea_pixel(m))
            .collect();
        Self::new(
            layout.grid(),
            mask,
            format!("fovea cells of the {} layout", layout.meta().name()),
        )
    }

    /// Inclusive one-based box `[x0, x1] × [y0, y1]`, clipped to the grid.
    pub fn from_box(
        grid: PixelGrid,
        (x0, y0): (usize, usize),
        (x1, y1): (usize, usize),
    ) -> Result<Self> {
        let mask = (0..grid.len())
            .map(|m| {
                let (x, y) = grid.coords(m);
                (x0..=x1).contains(&x) && (y0..=y1).contains(&y)
            })
            .collect();
        Self::new(grid, mask, format!("box ({x0}, {y0})-({x1}, {y1})"))
    }

    pub fn grid(&self) -> PixelGrid {
        self.grid
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.mask
    }

    pub fn note(&self) -> &str {
        &self.note
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
}

fn check(img: &Image, reference: &Image, mask: &RoiMask) -> Result<()> {
    img.check_grid(reference.grid())?;
    img.check_grid(mask.grid())
}

/// Mean squared error over the masked pixels.
pub fn mse(img: &Image, reference: &Image, mask: &RoiMask) -> Result<f64> {
    check(img, reference, mask)?;
    let (sum, count) = img
        .as_slice()
        .iter()
        .zip(reference.as_slice())
        .zip(mask.as_slice())
        .filter(|(_, &keep)| keep)
        .fold((0.0, 0usize), |(s, c), ((a, b), _)| {
            (s + (a - b) * (a - b), c + 1)
        });
    Ok(sum / count as f64)
}

/// Mean squared errors at or below this (an RMS error of 1e-12) count as
/// exact recovery; FFT round-off alone stays well under it.
pub const EXACT_MSE: f64 = 1e-24;

/// Peak signal-to-noise ratio in dB with peak 1. Identical images, and
/// images within [`EXACT_MSE`] of each other, give `f64::INFINITY`.
pub fn psnr(img: &Image, reference: &Image, mask: &RoiMask) -> Result<f64> {
    let e = mse(img, reference, mask)?;
    if e <= EXACT_MSE {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / e).log10())
}

const SSIM_WINDOW: usize = 8;

/// Summed-area table with a zero border row and column.
fn integral(grid: PixelGrid, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let (w, h) = (grid.width(), grid.height());
    let mut t = vec![0.0; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0.0;
        for x in 0..w {
            row += f(y * w + x);
            t[(y + 1) * (w + 1) + x + 1] = t[y * (w + 1) + x + 1] + row;
        }
    }
    t
}

#[inline]
fn window_sum(t: &[f64], stride: usize, x: usize, y: usize, k: usize) -> f64 {
    t[(y + k) * stride + x + k] - t[y * stride + x + k] - t[(y + k) * stride + x]
        + t[y * stride + x]
}

/// Mean SSIM over every 8×8 window (stride 1) that lies entirely inside the
/// mask, with uniform window weights, `C1 = (0.01)²` and `C2 = (0.03)²`.
pub fn ssim(img: &Image, reference: &Image, mask: &RoiMask) -> Result<f64> {
    check(img, reference, mask)?;
    let grid = img.grid();
    let (w, h) = (grid.width(), grid.height());
    let k = SSIM_WINDOW;
    if w < k || h < k {
        return Err(Error::Mask(format!(
            "grid {grid} is smaller than one {k}x{k} window"
        )));
    }
    let (a, b, m) = (img.as_slice(), reference.as_slice(), mask.as_slice());
    let sa = integral(grid, |i| a[i]);
    let sb = integral(grid, |i| b[i]);
    let saa = integral(grid, |i| a[i] * a[i]);
    let sbb = integral(grid, |i| b[i] * b[i]);
    let sab = integral(grid, |i| a[i] * b[i]);
    let sm = integral(grid, |i| f64::from(u8::from(m[i])));

    let (c1, c2) = (0.01f64.powi(2), 0.03f64.powi(2));
    let n = (k * k) as f64;
    let stride = w + 1;
    let mut total = 0.0;
    let mut windows = 0usize;
    for y in 0..=h - k {
        for x in 0..=w - k {
            if window_sum(&sm, stride, x, y, k) < n - 0.5 {
                continue;
            }
            let mu_a = window_sum(&sa, stride, x, y, k) / n;
            let mu_b = window_sum(&sb, stride, x, y, k) / n;
            let var_a = (window_sum(&saa, stride, x, y, k) / n - mu_a * mu_a).max(0.0);
            let var_b = (window_sum(&sbb, stride, x, y, k) / n - mu_b * mu_b).max(0.0);
            let cov = window_sum(&sab, stride, x, y, k) / n - mu_a * mu_b;
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
                / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            windows += 1;
        }
    }
    if windows == 0 {
        return Err(Error::Mask(format!("contains no full {k}x{k} window")));
    }
    Ok(total / windows as f64)
}
