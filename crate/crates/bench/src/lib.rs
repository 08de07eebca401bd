//! Fixtures shared by the benchmarks.

use uffsi_core::{
    build_circular_layout, build_rect_layout, make_test_chart, CellLayout, ChartSpec,
    CircularParams, Image, PixelGrid, RectParams,
};

pub fn desk_grid() -> PixelGrid {
    PixelGrid::new(128, 128).unwrap()
}

pub fn large_grid() -> PixelGrid {
    PixelGrid::new(1024, 768).unwrap()
}

pub fn desk_circular() -> CircularParams {
    CircularParams {
        center: (64.5, 64.5),
        r0: 21.0,
        epsilon: 1.05,
        sectors: 96,
    }
}

/// 341 × 255 cell lattice on the large grid.
pub fn large_rect() -> RectParams {
    RectParams {
        center: (512, 384),
        m0: 155,
        n0: 110,
        alpha1: 1.085,
        alpha2: 1.08,
    }
}

pub fn desk_layout() -> CellLayout {
    build_circular_layout(&desk_circular(), desk_grid()).unwrap()
}

pub fn large_layout() -> CellLayout {
    build_rect_layout(&large_rect(), large_grid()).unwrap()
}

pub fn chart(grid: PixelGrid) -> Image {
    make_test_chart(grid, &ChartSpec::centered(grid))
        .unwrap()
        .image
}
