//! Layout container, text summary and cell-map rendering.
//!
//! Container layout (all integers little-endian):
//!
//! ```text
//! magic   "UFSL"
//! version u32 = 1
//! width   u32, height u32
//! cells   u32   lattice point count
//! kind    u32   1 = line lattice, 2 = plane lattice
//! dim_u   u32, dim_v u32   (len, 1) for a line lattice
//! pixel_to_cell  [u32; width * height]
//! weights        [f64; cells]
//! kinds          [u8; cells]   0 periphery, 1 fovea, 2 empty
//! ```

use std::fmt::Write as _;
use std::io::{Read, Write};

use super::{compute_weights, CellKind, CellLayout, Lattice, StructureMeta};
use crate::binio::*;
use crate::error::{Error, Result};
use crate::grid::PixelGrid;
use crate::pgm::Graymap;

const MAGIC: &[u8; 4] = b"UFSL";
const VERSION: u32 = 1;

pub fn write_layout<W: Write>(layout: &CellLayout, mut w: W) -> Result<()> {
    let grid = layout.grid();
    let lattice = layout.lattice();
    write_header(&mut w, MAGIC, VERSION)?;
    put_u32(&mut w, grid.width() as u32)?;
    put_u32(&mut w, grid.height() as u32)?;
    put_u32(&mut w, lattice.len() as u32)?;
    let (kind, (du, dv)) = match lattice {
        Lattice::Line { .. } => (1, lattice.dims()),
        Lattice::Plane { .. } => (2, lattice.dims()),
    };
    put_u32(&mut w, kind)?;
    put_u32(&mut w, du as u32)?;
    put_u32(&mut w, dv as u32)?;
    let mut buf = Vec::with_capacity(grid.len() * 4 + lattice.len() * 9);
    for &n in layout.pixel_to_cell() {
        buf.extend_from_slice(&n.to_le_bytes());
    }
    for &v in compute_weights(layout).values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend(layout.kinds().iter().map(|k| match k {
        CellKind::Periphery => 0u8,
        CellKind::Fovea => 1,
        CellKind::Empty => 2,
    }));
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_layout<R: Read>(mut r: R) -> Result<CellLayout> {
    const WHAT: &str = "layout file";
    read_header(&mut r, WHAT, MAGIC, VERSION)?;
    let width = get_u32(&mut r)? as usize;
    let height = get_u32(&mut r)? as usize;
    let cells = get_u32(&mut r)? as usize;
    let kind = get_u32(&mut r)?;
    let du = get_u32(&mut r)? as usize;
    let dv = get_u32(&mut r)? as usize;
    let lattice = match kind {
        1 if dv == 1 && du == cells => Lattice::Line { len: cells },
        2 if du * dv == cells => Lattice::Plane {
            width: du,
            height: dv,
        },
        _ => return Err(Error::format(WHAT, "inconsistent lattice descriptor")),
    };
    let grid = PixelGrid::new(width, height)?;
    if cells > grid.len() * 4 {
        return Err(Error::format(WHAT, "implausible cell count"));
    }
    let pixel_to_cell = (0..grid.len())
        .map(|_| get_u32(&mut r))
        .collect::<Result<Vec<_>>>()?;
    let weights = (0..cells)
        .map(|_| get_f64(&mut r))
        .collect::<Result<Vec<_>>>()?;
    let kinds = (0..cells)
        .map(|_| get_u8(&mut r))
        .collect::<Result<Vec<_>>>()?;
    expect_end(&mut r, WHAT)?;

    let layout = CellLayout::from_assignment(
        grid,
        lattice,
        pixel_to_cell,
        |n| kinds[n] == 1,
        StructureMeta::Loaded,
    )?;
    let stored_ok = layout.kinds().iter().zip(&kinds).all(|(k, &b)| match k {
        CellKind::Periphery => b == 0,
        CellKind::Fovea => b == 1,
        CellKind::Empty => b == 2,
    });
    if !stored_ok || compute_weights(&layout).values() != weights.as_slice() {
        return Err(Error::format(
            WHAT,
            "stored weights or kinds disagree with the partition",
        ));
    }
    Ok(layout)
}

/// Human-readable description of a layout as `key: value` lines.
pub fn layout_summary(layout: &CellLayout) -> String {
    let grid = layout.grid();
    let count = |kind| layout.kinds().iter().filter(|&&k| k == kind).count();
    let mut s = String::new();
    let _ = writeln!(s, "structure: {}", layout.meta().name());
    let _ = writeln!(s, "grid: {grid}");
    let _ = writeln!(s, "pixels (M): {}", grid.len());
    let _ = writeln!(s, "cells (N): {}", layout.cell_count());
    let _ = match layout.lattice() {
        Lattice::Line { len } => writeln!(s, "lattice: line {len}"),
        Lattice::Plane { width, height } => writeln!(s, "lattice: plane {width}x{height}"),
    };
    let _ = writeln!(s, "fovea cells (N_c): {}", count(CellKind::Fovea));
    let _ = writeln!(s, "periphery cells: {}", count(CellKind::Periphery));
    let _ = writeln!(s, "empty lattice points: {}", count(CellKind::Empty));
    let _ = writeln!(
        s,
        "redundancy reduction: {:.4}",
        layout.redundancy_reduction()
    );
    match layout.meta() {
        StructureMeta::Circular(m) => {
            let _ = writeln!(s, "rings (P): {}", m.rings);
            let _ = writeln!(s, "sectors (Q): {}", m.sectors);
            let _ = writeln!(s, "deleted ring cells: {}", m.deleted_cells);
            let _ = writeln!(
                s,
                "cell bound: N = {} <= N_c + P*Q = {}",
                layout.cell_count(),
                m.cell_bound()
            );
        }
        StructureMeta::Rect(m) | StructureMeta::RotRect { rect: m, .. } => {
            let _ = writeln!(
                s,
                "layers (U, V): {}, {}",
                m.x.full_count(),
                m.y.full_count()
            );
            let _ = writeln!(
                s,
                "distinct layers (U', V'): {}, {}",
                m.x.centers.len(),
                m.y.centers.len()
            );
            if let StructureMeta::RotRect { theta, .. } = layout.meta() {
                let _ = writeln!(s, "theta: {theta}");
            }
        }
        _ => {}
    }
    s
}

/// Pseudo-random gray level per cell so that neighbouring cells contrast.
pub fn cell_map(layout: &CellLayout) -> Graymap {
    let grid = layout.grid();
    let samples = layout
        .pixel_to_cell()
        .iter()
        .map(|&n| {
            let h = n.wrapping_mul(0x9E37_79B1).rotate_right(13);
            32 + (h % 224) as u16
        })
        .collect();
    Graymap {
        width: grid.width(),
        height: grid.height(),
        maxval: 255,
        samples,
    }
}
