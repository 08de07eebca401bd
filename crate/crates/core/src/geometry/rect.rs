//! Rectangular structures: a box of single-pixel cells whose rows and
//! columns grow exponentially outside the box, independently in x and y.
//! The rotated variant lays the same lattice out in a frame turned by `θ`
//! about the box center.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use super::{CellLayout, Lattice, StructureMeta};
use crate::error::{Error, Result};
use crate::grid::PixelGrid;

const MAX_LAYERS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectParams {
    /// ROI center pixel, one-based.
    pub center: (usize, usize),
    /// ROI half-width in x, in pixels.
    pub m0: usize,
    /// ROI half-height in y, in pixels.
    pub n0: usize,
    /// Layer growth factor in x.
    pub alpha1: f64,
    /// Layer growth factor in y.
    pub alpha2: f64,
}

impl RectParams {
    pub fn validate(&self, grid: PixelGrid) -> Result<()> {
        let (xc, yc) = self.center;
        if !(1..=grid.width()).contains(&xc) || !(1..=grid.height()).contains(&yc) {
            return Err(Error::param(
                "center",
                format!("({xc}, {yc}) lies outside the {grid} grid"),
            ));
        }
        if self.m0 == 0 {
            return Err(Error::param("m0", "must be at least 1"));
        }
        if self.n0 == 0 {
            return Err(Error::param("n0", "must be at least 1"));
        }
        for (name, alpha) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(alpha.is_finite() && alpha > 1.0) {
                return Err(Error::param(name, format!("must be > 1, got {alpha}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotRectParams {
    pub rect: RectParams,
    /// Frame rotation in radians, in `[0, π/2)`.
    pub theta: f64,
}

/// Layer geometry along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisMeta {
    /// Layers on each side of the center, `(U - 1) / 2`.
    pub layers: usize,
    /// Layer radii `R_1 ..= R_layers`.
    pub radii: Vec<f64>,
    /// Distinct cell centers in ascending order; `U' = centers.len()`.
    pub centers: Vec<i64>,
    /// Clamp range of the centers.
    pub bounds: (i64, i64),
}

impl AxisMeta {
    /// Odd layer count `U` before deduplication.
    pub fn full_count(&self) -> usize {
        2 * self.layers + 1
    }

    /// Index of the center nearest to `pos`, ties to the lower index.
    #[inline]
    pub fn nearest(&self, pos: f64) -> usize {
        let c = &self.centers;
        let idx = c.partition_point(|&v| (v as f64) < pos);
        if idx == 0 {
            return 0;
        }
        if idx == c.len() {
            return c.len() - 1;
        }
        let below = pos - c[idx - 1] as f64;
        let above = c[idx] as f64 - pos;
        if above < below {
            idx
        } else {
            idx - 1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RectMeta {
    pub center: (usize, usize),
    pub m0: usize,
    pub n0: usize,
    pub x: AxisMeta,
    pub y: AxisMeta,
}

fn layer_radius(k: usize, half: usize, alpha: f64) -> f64 {
    if k <= half {
        k as f64
    } else {
        half as f64 * alpha.powi((k - half) as i32)
    }
}

/// Cell centers along one axis, clamped to `[lo, hi]`.
fn build_axis(
    name: &'static str,
    center: i64,
    (lo, hi): (i64, i64),
    half: usize,
    alpha: f64,
) -> Result<AxisMeta> {
    let reach = (center - lo).max(hi - center).max(0) as f64;
    let mut layers = 0usize;
    while layer_radius(layers, half, alpha) < reach {
        layers += 1;
        if layers > MAX_LAYERS {
            return Err(Error::param(
                name,
                format!("needs more than {MAX_LAYERS} layers to cover the grid"),
            ));
        }
    }
    let radii: Vec<f64> = (1..=layers).map(|k| layer_radius(k, half, alpha)).collect();
    let c = center as f64;
    let mut centers: Vec<i64> = radii
        .iter()
        .map(|r| ((c - r).round() as i64).max(lo))
        .chain(std::iter::once(center))
        .chain(radii.iter().map(|r| ((c + r).round() as i64).min(hi)))
        .collect();
    centers.sort_unstable();
    centers.dedup();
    Ok(AxisMeta {
        layers,
        radii,
        centers,
        bounds: (lo, hi),
    })
}

/// Shared assignment for the axis-aligned and rotated structures.
///
/// `frame` maps a pixel offset from the ROI center to working-frame offsets.
fn build_in_frame(
    params: &RectParams,
    grid: PixelGrid,
    frame: impl Fn(f64, f64) -> (f64, f64) + Sync,
    wrap: impl FnOnce(RectMeta) -> StructureMeta,
) -> Result<CellLayout> {
    params.validate(grid)?;
    let (xc, yc) = params.center;
    let (xcf, ycf) = (xc as f64, yc as f64);

    let (w, h) = (grid.width() as f64, grid.height() as f64);
    let corners = [(1.0, 1.0), (w, 1.0), (1.0, h), (w, h)].map(|(x, y)| frame(x - xcf, y - ycf));
    let span = |pick: fn(&(f64, f64)) -> f64| {
        corners
            .iter()
            .map(pick)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            })
    };
    let (xmin, xmax) = span(|c| c.0);
    let (ymin, ymax) = span(|c| c.1);
    let xbounds = ((xcf + xmin).floor() as i64, (xcf + xmax).ceil() as i64);
    let ybounds = ((ycf + ymin).floor() as i64, (ycf + ymax).ceil() as i64);

    let x = build_axis("alpha1", xc as i64, xbounds, params.m0, params.alpha1)?;
    let y = build_axis("alpha2", yc as i64, ybounds, params.n0, params.alpha2)?;
    let (cols, rows) = (x.centers.len(), y.centers.len());

    let pixel_to_cell: Vec<u32> = (0..grid.len())
        .into_par_iter()
        .map(|m| {
            let (px, py) = grid.coords(m);
            let (fx, fy) = frame(px as f64 - xcf, py as f64 - ycf);
            let u = x.nearest(xcf + fx);
            let v = y.nearest(ycf + fy);
            (v * cols + u) as u32
        })
        .collect();

    let (m0, n0) = (params.m0 as i64, params.n0 as i64);
    let in_box = |n: usize| {
        let (u, v) = (n % cols, n / cols);
        (x.centers[u] - xc as i64).abs() <= m0 && (y.centers[v] - yc as i64).abs() <= n0
    };
    let fovea: Vec<bool> = (0..cols * rows).map(in_box).collect();
    let meta = RectMeta {
        center: params.center,
        m0: params.m0,
        n0: params.n0,
        x,
        y,
    };
    CellLayout::from_assignment(
        grid,
        Lattice::Plane {
            width: cols,
            height: rows,
        },
        pixel_to_cell,
        |n| fovea[n],
        wrap(meta),
    )
}

pub fn build_rect_layout(params: &RectParams, grid: PixelGrid) -> Result<CellLayout> {
    build_in_frame(params, grid, |dx, dy| (dx, dy), StructureMeta::Rect)
}

/// Rotated structure.
///
/// Offsets are rotated with the y axis pointing up, then flipped back to
/// the image convention. Lattice points that receive no pixel remain in the
/// lattice as empty cells.
pub fn build_rotrect_layout(params: &RotRectParams, grid: PixelGrid) -> Result<CellLayout> {
    let theta = params.theta;
    if !(theta.is_finite() && (0.0..FRAC_PI_2).contains(&theta)) {
        return Err(Error::param(
            "theta",
            format!("must lie in [0, pi/2), got {theta}"),
        ));
    }
    let (sin, cos) = theta.sin_cos();
    build_in_frame(
        &params.rect,
        grid,
        move |dx, dy| {
            let up = -dy;
            let xr = cos * dx - sin * up;
            let yr = sin * dx + cos * up;
            (xr, -yr)
        },
        |rect| StructureMeta::RotRect { rect, theta },
    )
}

/// Uniform block layout: the grid divided into `cells_x × cells_y` boxes.
/// Box averaging over it is plain downsampling.
pub fn build_uniform_layout(grid: PixelGrid, cells_x: usize, cells_y: usize) -> Result<CellLayout> {
    if !(1..=grid.width()).contains(&cells_x) || !(1..=grid.height()).contains(&cells_y) {
        return Err(Error::param(
            "cells",
            format!("{cells_x}x{cells_y} blocks do not fit the {grid} grid"),
        ));
    }
    let (w, h) = (grid.width(), grid.height());
    let pixel_to_cell = (0..grid.len())
        .map(|m| {
            let (x, y) = (m % w, m / w);
            ((y * cells_y / h) * cells_x + x * cells_x / w) as u32
        })
        .collect();
    CellLayout::from_assignment(
        grid,
        Lattice::Plane {
            width: cells_x,
            height: cells_y,
        },
        pixel_to_cell,
        |_| true,
        StructureMeta::Uniform { cells_x, cells_y },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CellKind;

    fn grid(w: usize, h: usize) -> PixelGrid {
        PixelGrid::new(w, h).unwrap()
    }

    fn rect_meta(layout: &CellLayout) -> &RectMeta {
        match layout.meta() {
            StructureMeta::Rect(m) | StructureMeta::RotRect { rect: m, .. } => m,
            other => panic!("unexpected meta {other:?}"),
        }
    }

    #[test]
    fn roi_covering_fov_is_identity() {
        let g = grid(65, 65);
        let params = RectParams {
            center: (33, 33),
            m0: 32,
            n0: 32,
            alpha1: 1.5,
            alpha2: 1.5,
        };
        let layout = build_rect_layout(&params, g).unwrap();
        assert_eq!(layout.cell_count(), 4225);
        assert_eq!(
            layout.pixel_to_cell(),
            CellLayout::identity(g).pixel_to_cell()
        );
        assert!(layout.kinds().iter().all(|&k| k == CellKind::Fovea));
    }

    #[test]
    fn axis_centers_follow_layer_radii() {
        let params = RectParams {
            center: (17, 17),
            m0: 4,
            n0: 4,
            alpha1: 2.0,
            alpha2: 2.0,
        };
        let layout = build_rect_layout(&params, grid(33, 33)).unwrap();
        // Hand evaluation: 17 +- {1, 2, 3, 4}, 17 +- round(4 * 2), 17 +- round(4 * 4),
        // clamped to [1, 33]; 16 already reaches both edges.
        let mut oracle = vec![17i64];
        for r in [1.0f64, 2.0, 3.0, 4.0, 8.0, 16.0] {
            oracle.push(((17.0 - r).round() as i64).max(1));
            oracle.push(((17.0 + r).round() as i64).min(33));
        }
        oracle.sort_unstable();
        oracle.dedup();
        let meta = rect_meta(&layout);
        assert_eq!(meta.x.centers, oracle);
        assert_eq!(
            meta.x.centers,
            vec![1, 9, 13, 14, 15, 16, 17, 18, 19, 20, 21, 25, 33]
        );
        assert_eq!(meta.x.layers, 6);
        assert_eq!(meta.y.centers, oracle);
        assert_eq!(layout.cell_count(), 13 * 13);
    }

    #[test]
    fn rounding_duplicates_are_merged() {
        let params = RectParams {
            center: (20, 10),
            m0: 4,
            n0: 3,
            alpha1: 1.1,
            alpha2: 1.05,
        };
        let layout = build_rect_layout(&params, grid(40, 20)).unwrap();
        let meta = rect_meta(&layout);
        assert!(meta.x.centers.len() < meta.x.full_count());
        assert!(meta.x.centers.windows(2).all(|p| p[0] < p[1]));
        // No interior lattice point is left without pixels.
        assert!(!layout.kinds().contains(&CellKind::Empty));
    }

    #[test]
    fn nearest_center_ties_go_low() {
        let axis = AxisMeta {
            layers: 0,
            radii: vec![],
            centers: vec![1, 5, 9],
            bounds: (1, 9),
        };
        assert_eq!(axis.nearest(3.0), 0);
        assert_eq!(axis.nearest(3.5), 1);
        assert_eq!(axis.nearest(7.0), 1);
        assert_eq!(axis.nearest(-4.0), 0);
        assert_eq!(axis.nearest(12.0), 2);
    }

    #[test]
    fn interior_of_roi_is_single_pixel() {
        let params = RectParams {
            center: (30, 18),
            m0: 6,
            n0: 4,
            alpha1: 1.6,
            alpha2: 1.4,
        };
        let g = grid(64, 40);
        let layout = build_rect_layout(&params, g).unwrap();
        for m in 0..g.len() {
            let (x, y) = g.coords(m);
            if x.abs_diff(30) < 6 && y.abs_diff(18) < 4 {
                assert!(layout.is_fovea_pixel(m), "pixel ({x}, {y})");
            }
        }
        assert!(layout.fovea_count() >= 11 * 7);
    }

    #[test]
    fn zero_rotation_equals_rect() {
        let rect = RectParams {
            center: (21, 14),
            m0: 5,
            n0: 3,
            alpha1: 1.3,
            alpha2: 1.7,
        };
        let g = grid(50, 31);
        let a = build_rect_layout(&rect, g).unwrap();
        let b = build_rotrect_layout(&RotRectParams { rect, theta: 0.0 }, g).unwrap();
        assert_eq!(a.pixel_to_cell(), b.pixel_to_cell());
        assert_eq!(a.kinds(), b.kinds());
        assert_eq!(a.lattice(), b.lattice());
    }

    #[test]
    fn rotated_layout_flags_empty_cells() {
        let rect = RectParams {
            center: (32, 32),
            m0: 6,
            n0: 4,
            alpha1: 1.3,
            alpha2: 1.3,
        };
        let g = grid(64, 64);
        let layout = build_rotrect_layout(&RotRectParams { rect, theta: 0.3 }, g).unwrap();
        let sizes = layout.cell_sizes();
        assert_eq!(sizes.iter().map(|&s| s as usize).sum::<usize>(), g.len());
        let empty = layout
            .kinds()
            .iter()
            .filter(|&&k| k == CellKind::Empty)
            .count();
        assert!(empty > 0);
        for (k, &s) in layout.kinds().iter().zip(sizes) {
            assert_eq!(*k == CellKind::Empty, s == 0);
        }
        assert!(layout.cell_count() < layout.lattice().len());
    }

    #[test]
    fn rotation_keeps_fovea_size_statistics() {
        // Rotating the frame only reshuffles which pixels fall where; the
        // number of single-pixel ROI cells stays close to the ROI area.
        let rect = RectParams {
            center: (48, 48),
            m0: 12,
            n0: 8,
            alpha1: 1.25,
            alpha2: 1.25,
        };
        let g = grid(96, 96);
        let straight = build_rect_layout(&rect, g).unwrap().fovea_count() as f64;
        for theta in [0.2, 0.5, 1.0, 1.4] {
            let rotated = build_rotrect_layout(&RotRectParams { rect, theta }, g)
                .unwrap()
                .fovea_count() as f64;
            assert!(
                (rotated - straight).abs() / straight < 0.35,
                "theta {theta}: {rotated} vs {straight}"
            );
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = grid(32, 32);
        let base = RectParams {
            center: (16, 16),
            m0: 3,
            n0: 3,
            alpha1: 1.5,
            alpha2: 1.5,
        };
        for bad in [
            RectParams {
                alpha1: 1.0,
                ..base
            },
            RectParams {
                alpha2: 0.9,
                ..base
            },
            RectParams { m0: 0, ..base },
            RectParams {
                center: (0, 16),
                ..base
            },
            RectParams {
                center: (16, 33),
                ..base
            },
        ] {
            assert!(build_rect_layout(&bad, g).is_err());
        }
        for theta in [-0.1, FRAC_PI_2, 2.0, f64::NAN] {
            assert!(build_rotrect_layout(&RotRectParams { rect: base, theta }, g).is_err());
        }
    }

    #[test]
    fn coarser_growth_never_adds_cells() {
        let g = grid(128, 96);
        let mut last = usize::MAX;
        for alpha in [1.01, 1.05, 1.1, 1.2, 1.4, 1.8, 2.5, 4.0] {
            let params = RectParams {
                center: (50, 60),
                m0: 5,
                n0: 7,
                alpha1: alpha,
                alpha2: alpha,
            };
            let n = build_rect_layout(&params, g).unwrap().cell_count();
            assert!(n <= last, "alpha {alpha}: {n} > {last}");
            last = n;
        }
    }

    #[test]
    fn uniform_blocks_downsample() {
        let g = grid(12, 9);
        let layout = build_uniform_layout(g, 4, 3).unwrap();
        assert!(layout.cell_sizes().iter().all(|&s| s == 9));
        assert!(build_uniform_layout(g, 13, 3).is_err());
        let full = build_uniform_layout(g, 12, 9).unwrap();
        assert_eq!(
            full.pixel_to_cell(),
            CellLayout::identity(g).pixel_to_cell()
        );
    }
}
