//! Foveated cell layouts.
//!
//! A [`CellLayout`] partitions the `M` pixels of a [`PixelGrid`] into cells
//! that sit on a uniform transform lattice. The pixel→cell table is the
//! compressed form of the 0/1 mapping matrix between pixels and cells: every
//! pixel belongs to exactly one cell.

mod circular;
pub mod io;
mod rect;

pub use circular::{build_circular_layout, CircularMeta, CircularParams};
pub use rect::{
    build_rect_layout, build_rotrect_layout, build_uniform_layout, AxisMeta, RectMeta, RectParams,
    RotRectParams,
};

use crate::error::{Error, Result};
use crate::grid::{Image, PixelGrid};

/// Index space of the cells, on which the Fourier basis is uniform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lattice {
    /// Cells flattened into a single sequence.
    Line { len: usize },
    /// Cells on a `width × height` grid, indexed `n = v * width + u`.
    Plane { width: usize, height: usize },
}

impl Lattice {
    pub fn len(&self) -> usize {
        match *self {
            Lattice::Line { len } => len,
            Lattice::Plane { width, height } => width * height,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Extent along each transform axis; `(len, 1)` for a line lattice.
    pub fn dims(&self) -> (usize, usize) {
        match *self {
            Lattice::Line { len } => (len, 1),
            Lattice::Plane { width, height } => (width, height),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    /// Single-pixel cell inside the region of interest.
    Fovea,
    Periphery,
    /// Lattice point that no pixel maps to.
    Empty,
}

/// Construction record of a layout.
#[derive(Debug, Clone, PartialEq)]
pub enum StructureMeta {
    Identity,
    Circular(CircularMeta),
    Rect(RectMeta),
    RotRect {
        rect: RectMeta,
        theta: f64,
    },
    Uniform {
        cells_x: usize,
        cells_y: usize,
    },
    /// Read back from a serialized layout; construction details are not stored.
    Loaded,
}

impl StructureMeta {
    pub fn name(&self) -> &'static str {
        match self {
            StructureMeta::Identity => "identity",
            StructureMeta::Circular(_) => "circular",
            StructureMeta::Rect(_) => "rect",
            StructureMeta::RotRect { .. } => "rotrect",
            StructureMeta::Uniform { .. } => "uniform",
            StructureMeta::Loaded => "loaded",
        }
    }
}

/// Partition of a pixel grid into cells on a uniform lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct CellLayout {
    grid: PixelGrid,
    lattice: Lattice,
    pixel_to_cell: Vec<u32>,
    cell_sizes: Vec<u32>,
    kinds: Vec<CellKind>,
    meta: StructureMeta,
}

impl CellLayout {
    /// Assembles a layout from a complete pixel→cell table.
    ///
    /// `is_fovea` is consulted for every single-pixel cell; multi-pixel cells
    /// are always periphery and cells without pixels are empty. Line lattices
    /// may not contain empty cells.
    pub fn from_assignment(
        grid: PixelGrid,
        lattice: Lattice,
        pixel_to_cell: Vec<u32>,
        is_fovea: impl Fn(usize) -> bool,
        meta: StructureMeta,
    ) -> Result<Self> {
        if pixel_to_cell.len() != grid.len() {
            return Err(Error::dims(
                format!("{} pixel assignments", grid.len()),
                pixel_to_cell.len(),
            ));
        }
        let n_cells = lattice.len();
        if n_cells == 0 || n_cells > grid.len() && matches!(lattice, Lattice::Line { .. }) {
            return Err(Error::param(
                "lattice",
                format!("{n_cells} cells for {} pixels", grid.len()),
            ));
        }
        let mut cell_sizes = vec![0u32; n_cells];
        for (m, &n) in pixel_to_cell.iter().enumerate() {
            let slot = cell_sizes.get_mut(n as usize).ok_or_else(|| {
                Error::param(
                    "pixel_to_cell",
                    format!("pixel {m} maps to cell {n} outside a lattice of {n_cells}"),
                )
            })?;
            *slot += 1;
        }
        let kinds: Vec<CellKind> = cell_sizes
            .iter()
            .enumerate()
            .map(|(n, &s)| match s {
                0 => CellKind::Empty,
                1 if is_fovea(n) => CellKind::Fovea,
                _ => CellKind::Periphery,
            })
            .collect();
        if matches!(lattice, Lattice::Line { .. }) && kinds.contains(&CellKind::Empty) {
            return Err(Error::param(
                "lattice",
                "line lattices cannot hold empty cells",
            ));
        }
        Ok(Self {
            grid,
            lattice,
            pixel_to_cell,
            cell_sizes,
            kinds,
            meta,
        })
    }

    /// Every pixel is its own cell on a 2D lattice the size of the grid.
    pub fn identity(grid: PixelGrid) -> Self {
        let pixel_to_cell = (0..grid.len() as u32).collect();
        Self::from_assignment(
            grid,
            Lattice::Plane {
                width: grid.width(),
                height: grid.height(),
            },
            pixel_to_cell,
            |_| true,
            StructureMeta::Identity,
        )
        .expect("identity assignment is a valid partition")
    }

    #[inline]
    pub fn grid(&self) -> PixelGrid {
        self.grid
    }

    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    #[inline]
    pub fn pixel_to_cell(&self) -> &[u32] {
        &self.pixel_to_cell
    }

    #[inline]
    pub fn cell_sizes(&self) -> &[u32] {
        &self.cell_sizes
    }

    #[inline]
    pub fn kinds(&self) -> &[CellKind] {
        &self.kinds
    }

    pub fn meta(&self) -> &StructureMeta {
        &self.meta
    }

    /// Cell count `N`, counting non-empty cells only.
    pub fn cell_count(&self) -> usize {
        self.cell_sizes.iter().filter(|&&s| s > 0).count()
    }

    /// Number of fovea cells `N_c`.
    pub fn fovea_count(&self) -> usize {
        self.kinds.iter().filter(|&&k| k == CellKind::Fovea).count()
    }

    pub fn is_fovea_pixel(&self, m: usize) -> bool {
        self.kinds[self.pixel_to_cell[m] as usize] == CellKind::Fovea
    }

    /// Pixel indices grouped by cell, each group in raster order.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut cells: Vec<Vec<usize>> = self
            .cell_sizes
            .iter()
            .map(|&s| Vec::with_capacity(s as usize))
            .collect();
        for (m, &n) in self.pixel_to_cell.iter().enumerate() {
            cells[n as usize].push(m);
        }
        cells
    }

    /// Fraction of pixel-level degrees of freedom removed, `(M - N) / M`.
    pub fn redundancy_reduction(&self) -> f64 {
        crate::metrics::redundancy_reduction(self.grid.len(), self.cell_count())
            .expect("a partition never has more cells than pixels")
    }

    pub(crate) fn check_lattice_len(&self, len: usize) -> Result<()> {
        if len != self.lattice.len() {
            return Err(Error::dims(
                format!("{} lattice values", self.lattice.len()),
                len,
            ));
        }
        Ok(())
    }
}

/// Per-cell normalization factors `w(n) = 1 / |cell n|`; zero for empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    denominators: Vec<u32>,
    values: Vec<f64>,
}

impl WeightVector {
    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact reciprocal denominator of cell `n` (its pixel count); 0 for empty cells.
    #[inline]
    pub fn denominator(&self, n: usize) -> u32 {
        self.denominators[n]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub(crate) fn check_layout(&self, layout: &CellLayout) -> Result<()> {
        if self.denominators.as_slice() != layout.cell_sizes() {
            return Err(Error::dims(
                "weights derived from this layout",
                format!("{} weights from another layout", self.len()),
            ));
        }
        Ok(())
    }
}

pub fn compute_weights(layout: &CellLayout) -> WeightVector {
    let denominators = layout.cell_sizes().to_vec();
    let values = denominators
        .iter()
        .map(|&s| if s == 0 { 0.0 } else { 1.0 / f64::from(s) })
        .collect();
    WeightVector {
        denominators,
        values,
    }
}

/// Mean of the scene over each cell, on the layout lattice. Empty cells get 0.
pub fn cell_average(scene: &Image, layout: &CellLayout) -> Result<Vec<f64>> {
    scene.check_grid(layout.grid())?;
    let mut sums = vec![0.0; layout.lattice().len()];
    for (&n, &v) in layout.pixel_to_cell().iter().zip(scene.as_slice()) {
        sums[n as usize] += v;
    }
    for (sum, &size) in sums.iter_mut().zip(layout.cell_sizes()) {
        if size > 0 {
            *sum /= f64::from(size);
        }
    }
    Ok(sums)
}

/// Paints each pixel with the value of its cell.
pub fn expand_to_pixels(lattice_values: &[f64], layout: &CellLayout) -> Result<Image> {
    layout.check_lattice_len(lattice_values.len())?;
    let data = layout
        .pixel_to_cell()
        .iter()
        .map(|&n| lattice_values[n as usize])
        .collect();
    Image::from_vec(layout.grid(), data)
}
