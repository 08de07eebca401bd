//! Circular structure: a disc of single-pixel fovea cells surrounded by
//! exponentially growing rings, each split into equal angular sectors.

use std::f64::consts::TAU;

use rayon::prelude::*;

use super::{CellLayout, Lattice, StructureMeta};
use crate::error::{Error, Result};
use crate::grid::PixelGrid;

const MAX_RINGS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularParams {
    /// Fovea center in pixel coordinates; may fall between pixel centers.
    pub center: (f64, f64),
    /// Fovea radius in pixels.
    pub r0: f64,
    /// Ratio between the outer radii of adjacent rings.
    pub epsilon: f64,
    /// Sectors per ring.
    pub sectors: usize,
}

impl CircularParams {
    pub fn validate(&self, grid: PixelGrid) -> Result<()> {
        let (cx, cy) = self.center;
        let inside = |c: f64, extent: usize| c.is_finite() && c >= 0.5 && c <= extent as f64 + 0.5;
        if !inside(cx, grid.width()) || !inside(cy, grid.height()) {
            return Err(Error::param(
                "center",
                format!("({cx}, {cy}) lies outside the {grid} grid"),
            ));
        }
        if !(self.r0.is_finite() && self.r0 >= 1.0) {
            return Err(Error::param("r0", format!("must be >= 1, got {}", self.r0)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 1.0) {
            return Err(Error::param(
                "epsilon",
                format!("must be > 1, got {}", self.epsilon),
            ));
        }
        if self.sectors == 0 {
            return Err(Error::param("sectors", "must be at least 1"));
        }
        Ok(())
    }
}

/// Derived ring geometry of a circular layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CircularMeta {
    /// Ring count `P`.
    pub rings: usize,
    pub sectors: usize,
    /// Outer radius `r0 * ε^p` of rings `p = 1..=P`.
    pub ring_outer_radii: Vec<f64>,
    /// Center radius of each ring; the first is `r0 (1 + ε) / 2`.
    pub ring_center_radii: Vec<f64>,
    /// `log_ε` of the center radii; consecutive entries differ by one.
    pub log_coords: Vec<f64>,
    pub fovea_cells: usize,
    /// Ring sectors that hold no pixel of the grid and were dropped.
    pub deleted_cells: usize,
}

impl CircularMeta {
    /// Upper bound `N_c + P·Q` on the cell count before deletion.
    pub fn cell_bound(&self) -> usize {
        self.fovea_cells + self.rings * self.sectors
    }
}

/// Smallest ring count whose outermost radius reaches `reach`.
fn ring_count(r0: f64, epsilon: f64, reach: f64) -> Result<usize> {
    let mut p = 0usize;
    while r0 * epsilon.powi(p as i32) < reach {
        p += 1;
        if p > MAX_RINGS {
            return Err(Error::param(
                "epsilon",
                format!("needs more than {MAX_RINGS} rings to cover the grid"),
            ));
        }
    }
    Ok(p)
}

/// Angle of `(x, y)` about the center, counterclockwise on screen from +x, in `[0, 2π)`.
#[inline]
pub(crate) fn screen_angle(dx: f64, dy_down: f64) -> f64 {
    let w = (-dy_down).atan2(dx);
    if w < 0.0 {
        w + TAU
    } else {
        w
    }
}

pub fn build_circular_layout(params: &CircularParams, grid: PixelGrid) -> Result<CellLayout> {
    params.validate(grid)?;
    let CircularParams {
        center: (cx, cy),
        r0,
        epsilon,
        sectors,
    } = *params;

    let reach = grid.farthest_corner_distance(cx, cy);
    let rings = ring_count(r0, epsilon, reach)?;
    let outer: Vec<f64> = (1..=rings).map(|p| r0 * epsilon.powi(p as i32)).collect();

    // Fovea pixels are tagged `None`, ring pixels carry `(p - 1) * Q + q`.
    let codes: Vec<Option<u64>> = (0..grid.len())
        .into_par_iter()
        .map(|m| {
            let (x, y) = grid.coords(m);
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            let r = (dx * dx + dy * dy).sqrt();
            if r <= r0 {
                return None;
            }
            let ring = outer.partition_point(|&rp| rp < r).min(rings - 1);
            let omega = screen_angle(dx, dy);
            let q = ((omega * sectors as f64 / TAU).floor() as usize).min(sectors - 1);
            Some(ring as u64 * sectors as u64 + q as u64)
        })
        .collect();

    let fovea_cells = codes.iter().filter(|c| c.is_none()).count();
    let mut used: Vec<u64> = codes.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();

    let mut next_fovea = 0u32;
    let pixel_to_cell: Vec<u32> = codes
        .iter()
        .map(|code| match code {
            None => {
                next_fovea += 1;
                next_fovea - 1
            }
            Some(code) => {
                let rank = used.binary_search(code).expect("code was collected");
                (fovea_cells + rank) as u32
            }
        })
        .collect();

    let ring_center_radii: Vec<f64> = (0..rings)
        .map(|i| r0 * (1.0 + epsilon) / 2.0 * epsilon.powi(i as i32))
        .collect();
    let log_coords = ring_center_radii
        .iter()
        .map(|r| r.ln() / epsilon.ln())
        .collect();
    let meta = CircularMeta {
        rings,
        sectors,
        ring_outer_radii: outer,
        ring_center_radii,
        log_coords,
        fovea_cells,
        deleted_cells: rings * sectors - used.len(),
    };

    CellLayout::from_assignment(
        grid,
        Lattice::Line {
            len: fovea_cells + used.len(),
        },
        pixel_to_cell,
        |n| n < fovea_cells,
        StructureMeta::Circular(meta),
    )
}
