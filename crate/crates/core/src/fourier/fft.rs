use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::geometry::Lattice;

/// Unnormalized forward transform over the lattice, in place.
#[cfg(test)]
pub(crate) fn forward(lattice: Lattice, buf: &mut [Complex64]) {
    transform(lattice, buf, FftDirection::Forward);
}

/// Unnormalized inverse transform over the lattice, in place.
pub(crate) fn inverse(lattice: Lattice, buf: &mut [Complex64]) {
    transform(lattice, buf, FftDirection::Inverse);
}

fn transform(lattice: Lattice, buf: &mut [Complex64], direction: FftDirection) {
    let (nu, nv) = lattice.dims();
    assert_eq!(buf.len(), nu * nv, "buffer does not match lattice");
    let mut planner = FftPlanner::<f64>::new();

    // Rows are contiguous; rustfft walks consecutive chunks of `nu`.
    planner.plan_fft(nu, direction).process(buf);
    if nv == 1 {
        return;
    }

    let mut cols = vec![Complex64::default(); buf.len()];
    transpose(buf, &mut cols, nu, nv);
    planner.plan_fft(nv, direction).process(&mut cols);
    transpose(&cols, buf, nv, nu);
}

/// `src` is `rows × width` row-major; `dst` receives `width × rows`.
fn transpose(src: &[Complex64], dst: &mut [Complex64], width: usize, rows: usize) {
    const TILE: usize = 32;
    for r0 in (0..rows).step_by(TILE) {
        for c0 in (0..width).step_by(TILE) {
            for r in r0..(r0 + TILE).min(rows) {
                for c in c0..(c0 + TILE).min(width) {
                    dst[c * rows + r] = src[r * width + c];
                }
            }
        }
    }
}
