#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uffsi_core::{
    build_circular_layout, build_rect_layout, build_rotrect_layout, CellLayout, CircularParams,
    Frequency, Image, Lattice, Phase, PixelGrid, RectParams, RotRectParams,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Circular,
    Rect,
    RotRect,
}

pub const STRUCTURES: [Structure; 3] = [Structure::Circular, Structure::Rect, Structure::RotRect];

pub fn random_grid(rng: &mut impl Rng, max_w: usize, max_h: usize) -> PixelGrid {
    PixelGrid::new(rng.random_range(4..=max_w), rng.random_range(4..=max_h)).unwrap()
}

pub fn random_rect(rng: &mut impl Rng, grid: PixelGrid) -> RectParams {
    let (w, h) = (grid.width(), grid.height());
    RectParams {
        center: (rng.random_range(1..=w), rng.random_range(1..=h)),
        m0: rng.random_range(1..=(w / 3).max(1)),
        n0: rng.random_range(1..=(h / 3).max(1)),
        alpha1: rng.random_range(1.05..2.5),
        alpha2: rng.random_range(1.05..2.5),
    }
}

pub fn random_layout(rng: &mut impl Rng, structure: Structure, grid: PixelGrid) -> CellLayout {
    let (w, h) = (grid.width() as f64, grid.height() as f64);
    match structure {
        Structure::Circular => {
            let params = CircularParams {
                center: (
                    rng.random_range(0.5..=w + 0.5),
                    rng.random_range(0.5..=h + 0.5),
                ),
                r0: rng.random_range(1.0..w.min(h) / 2.0 + 1.0),
                epsilon: rng.random_range(1.05..2.5),
                sectors: rng.random_range(1..=48),
            };
            build_circular_layout(&params, grid).unwrap()
        }
        Structure::Rect => build_rect_layout(&random_rect(rng, grid), grid).unwrap(),
        Structure::RotRect => {
            let params = RotRectParams {
                rect: random_rect(rng, grid),
                theta: rng.random_range(0.0..FRAC_PI_2),
            };
            build_rotrect_layout(&params, grid).unwrap()
        }
    }
}

pub fn random_scene(rng: &mut impl Rng, grid: PixelGrid) -> Image {
    Image::from_fn(grid, |_, _| rng.random::<f64>())
}

pub fn random_frequency(rng: &mut impl Rng, lattice: Lattice) -> Frequency {
    let (nu, nv) = lattice.dims();
    Frequency::new(signed_index(rng, nu), signed_index(rng, nv))
}

/// Uniform draw from the signed range `(-n/2, n/2]`.
fn signed_index(rng: &mut impl Rng, n: usize) -> i64 {
    let n = n as i64;
    rng.random_range(-((n - 1) / 2)..=n / 2)
}

pub fn random_phase(rng: &mut impl Rng) -> Phase {
    Phase::ALL[rng.random_range(0..4)]
}

/// Cell means computed straight from the pixel assignment.
pub fn cell_means(scene: &Image, layout: &CellLayout) -> Vec<f64> {
    let n = layout.lattice().len();
    let mut sum = vec![0.0; n];
    let mut count = vec![0usize; n];
    for (m, &c) in layout.pixel_to_cell().iter().enumerate() {
        sum[c as usize] += scene.as_slice()[m];
        count[c as usize] += 1;
    }
    sum.iter()
        .zip(&count)
        .map(|(&s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
        .collect()
}

pub fn paint(values: &[f64], layout: &CellLayout) -> Vec<f64> {
    layout
        .pixel_to_cell()
        .iter()
        .map(|&c| values[c as usize])
        .collect()
}

/// `a + b cos(2π (ku u / U + kv v / V) + φ)` at lattice index `n`.
pub fn fsi_value(lattice: Lattice, f: Frequency, phase: Phase, a: f64, b: f64, n: usize) -> f64 {
    let (nu, nv) = lattice.dims();
    let (u, v) = (n % nu, n / nu);
    let theta =
        2.0 * PI * (f.ku as f64 * u as f64 / nu as f64 + f.kv as f64 * v as f64 / nv as f64);
    a + b * (theta + phase.radians()).cos()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}
