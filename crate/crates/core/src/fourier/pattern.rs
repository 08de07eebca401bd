use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rustfft::num_complex::Complex64;

use super::plan::Frequency;
use crate::error::{Error, Result};
use crate::geometry::{CellLayout, Lattice, WeightVector};
use crate::grid::Image;

/// Intensity model `a + b cos(·)` of the projected patterns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternSpec {
    /// DC level.
    pub a: f64,
    /// Contrast.
    pub b: f64,
}

impl Default for PatternSpec {
    fn default() -> Self {
        Self { a: 0.5, b: 0.5 }
    }
}

impl PatternSpec {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let spec = Self { a, b };
        spec.validate()?;
        Ok(spec)
    }

    /// Pattern values must stay within `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        let Self { a, b } = *self;
        if !(a.is_finite() && b.is_finite()) || a < 0.0 || b <= 0.0 || a + b > 1.0 || a - b < 0.0 {
            return Err(Error::param(
                "pattern",
                format!("need a >= b > 0 and a + b <= 1, got a = {a}, b = {b}"),
            ));
        }
        Ok(())
    }
}

/// The four phase steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Zero,
    HalfPi,
    Pi,
    ThreeHalfPi,
}

impl Phase {
    pub const ALL: [Phase; 4] = [Phase::Zero, Phase::HalfPi, Phase::Pi, Phase::ThreeHalfPi];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn radians(self) -> f64 {
        match self {
            Phase::Zero => 0.0,
            Phase::HalfPi => FRAC_PI_2,
            Phase::Pi => PI,
            Phase::ThreeHalfPi => 3.0 * FRAC_PI_2,
        }
    }

    pub fn degrees(self) -> u32 {
        90 * self as u32
    }

    /// `cos(θ + φ)` from the phasor `exp(jθ)`, without rounding the shift.
    #[inline]
    pub fn shifted_cos(self, z: Complex64) -> f64 {
        match self {
            Phase::Zero => z.re,
            Phase::HalfPi => -z.im,
            Phase::Pi => -z.re,
            Phase::ThreeHalfPi => z.im,
        }
    }
}

/// `exp(j 2π t / n)` with exact values on the axes.
fn unit_root(t: usize, n: usize) -> Complex64 {
    if t == 0 {
        Complex64::new(1.0, 0.0)
    } else if 2 * t == n {
        Complex64::new(-1.0, 0.0)
    } else if 4 * t == n {
        Complex64::new(0.0, 1.0)
    } else if 4 * t == 3 * n {
        Complex64::new(0.0, -1.0)
    } else {
        let (s, c) = (TAU * t as f64 / n as f64).sin_cos();
        Complex64::new(c, s)
    }
}

/// Roots of unity for both lattice axes, shared by all frequencies.
#[derive(Debug, Clone)]
pub struct Twiddles {
    lattice: Lattice,
    u: Vec<Complex64>,
    v: Vec<Complex64>,
}

impl Twiddles {
    pub fn new(lattice: Lattice) -> Self {
        let (nu, nv) = lattice.dims();
        Self {
            lattice,
            u: (0..nu).map(|t| unit_root(t, nu)).collect(),
            v: (0..nv).map(|t| unit_root(t, nv)).collect(),
        }
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }
}

/// Phasors `exp(j 2π (ku u / U + kv v / V))` over the lattice, row-major.
pub fn cell_phasors(twiddles: &Twiddles, freq: Frequency) -> Vec<Complex64> {
    let lattice = twiddles.lattice;
    let (nu, nv) = lattice.dims();
    let (ku, kv) = freq.wrapped(lattice);
    let row: Vec<Complex64> = (0..nu).map(|u| twiddles.u[(ku * u) % nu]).collect();
    let mut out = Vec::with_capacity(nu * nv);
    for v in 0..nv {
        let zv = twiddles.v[(kv * v) % nv];
        if kv == 0 || v == 0 {
            out.extend_from_slice(&row);
        } else {
            out.extend(row.iter().map(|&zu| zu * zv));
        }
    }
    out
}

fn check_frequency(lattice: Lattice, freq: Frequency) -> Result<()> {
    let (nu, nv) = lattice.dims();
    let ok = |k: i64, n: usize| {
        let n = n as i64;
        2 * k > -n && 2 * k <= n
    };
    if !ok(freq.ku, nu) || !ok(freq.kv, nv) {
        return Err(Error::param(
            "frequency",
            format!("({}, {}) outside the {nu}x{nv} lattice", freq.ku, freq.kv),
        ));
    }
    Ok(())
}

/// Fourier basis pattern on the lattice: `a + b cos(2π k·n + φ)`.
pub fn synthesize_fsi_pattern(
    lattice: Lattice,
    freq: Frequency,
    phase: Phase,
    spec: &PatternSpec,
) -> Result<Vec<f64>> {
    spec.validate()?;
    check_frequency(lattice, freq)?;
    let z = cell_phasors(&Twiddles::new(lattice), freq);
    Ok(z.iter()
        .map(|&z| spec.a + spec.b * phase.shifted_cos(z))
        .collect())
}

/// Weighted foveated pattern on the pixel grid: every pixel carries its
/// cell's basis value scaled by the cell weight.
pub fn synthesize_uffsi_pattern(
    layout: &CellLayout,
    weights: &WeightVector,
    freq: Frequency,
    phase: Phase,
    spec: &PatternSpec,
) -> Result<Image> {
    weights.check_layout(layout)?;
    let cells = synthesize_fsi_pattern(layout.lattice(), freq, phase, spec)?;
    let w = weights.values();
    let data = layout
        .pixel_to_cell()
        .iter()
        .map(|&n| w[n as usize] * cells[n as usize])
        .collect();
    Image::from_vec(layout.grid(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{compute_weights, StructureMeta};
    use crate::grid::PixelGrid;

    const LINE16: Lattice = Lattice::Line { len: 16 };

    #[test]
    fn dc_patterns_are_flat() {
        let spec = PatternSpec::new(0.6, 0.3).unwrap();
        let bright = synthesize_fsi_pattern(LINE16, Frequency::DC, Phase::Zero, &spec).unwrap();
        let dark = synthesize_fsi_pattern(LINE16, Frequency::DC, Phase::Pi, &spec).unwrap();
        assert!(bright.iter().all(|&v| v == spec.a + spec.b));
        assert!(dark.iter().all(|&v| (v - 0.3).abs() < 1e-15));
    }

    #[test]
    fn matches_direct_cosine() {
        let lattice = Lattice::Plane {
            width: 7,
            height: 5,
        };
        let spec = PatternSpec::default();
        let f = Frequency::new(-3, 2);
        for phase in Phase::ALL {
            let p = synthesize_fsi_pattern(lattice, f, phase, &spec).unwrap();
            for v in 0..5 {
                for u in 0..7 {
                    let arg =
                        TAU * (-3.0 * u as f64 / 7.0 + 2.0 * v as f64 / 5.0) + phase.radians();
                    let direct = 0.5 + 0.5 * arg.cos();
                    assert!((p[v * 7 + u] - direct).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn differential_patterns_are_orthogonal() {
        let spec = PatternSpec::default();
        let diff = |k: i64| {
            let p0 =
                synthesize_fsi_pattern(LINE16, Frequency::new(k, 0), Phase::Zero, &spec).unwrap();
            let p1 =
                synthesize_fsi_pattern(LINE16, Frequency::new(k, 0), Phase::Pi, &spec).unwrap();
            p0.iter().zip(&p1).map(|(a, b)| a - b).collect::<Vec<_>>()
        };
        for k in 0..=8 {
            for k2 in 0..=8 {
                if k == k2 {
                    continue;
                }
                let dot: f64 = diff(k).iter().zip(diff(k2)).map(|(a, b)| a * b).sum();
                assert!(dot.abs() < 1e-9, "k = {k}, k' = {k2}: {dot}");
            }
        }
    }

    #[test]
    fn values_stay_in_range() {
        let spec = PatternSpec::new(0.5, 0.4).unwrap();
        let p = synthesize_fsi_pattern(
            Lattice::Plane {
                width: 9,
                height: 6,
            },
            Frequency::new(4, 3),
            Phase::HalfPi,
            &spec,
        )
        .unwrap();
        assert!(p.iter().all(|&v| (0.1 - 1e-15..=0.9 + 1e-15).contains(&v)));
    }

    #[test]
    fn identity_layout_gives_plain_fsi() {
        let grid = PixelGrid::new(6, 4).unwrap();
        let layout = CellLayout::identity(grid);
        let w = compute_weights(&layout);
        let spec = PatternSpec::default();
        let f = Frequency::new(2, -1);
        let uffsi = synthesize_uffsi_pattern(&layout, &w, f, Phase::Pi, &spec).unwrap();
        let fsi = synthesize_fsi_pattern(layout.lattice(), f, Phase::Pi, &spec).unwrap();
        assert_eq!(uffsi.as_slice(), fsi.as_slice());
    }

    #[test]
    fn weights_cancel_cell_sizes() {
        let grid = PixelGrid::new(4, 3).unwrap();
        let layout = CellLayout::from_assignment(
            grid,
            Lattice::Line { len: 5 },
            vec![0, 0, 1, 1, 0, 0, 2, 1, 3, 3, 4, 4],
            |_| true,
            StructureMeta::Loaded,
        )
        .unwrap();
        let w = compute_weights(&layout);
        let spec = PatternSpec::default();
        let f = Frequency::new(2, 0);
        let img = synthesize_uffsi_pattern(&layout, &w, f, Phase::HalfPi, &spec).unwrap();
        let cells = synthesize_fsi_pattern(layout.lattice(), f, Phase::HalfPi, &spec).unwrap();
        let pixel_sum: f64 = img.as_slice().iter().sum();
        let cell_sum: f64 = cells.iter().sum();
        assert!((pixel_sum - cell_sum).abs() < 1e-12);
        assert!(img.as_slice().iter().all(|&v| (0.0..=w.max()).contains(&v)));
    }

    #[test]
    fn rejects_foreign_weights_and_bad_frequency() {
        let grid = PixelGrid::new(4, 4).unwrap();
        let layout = CellLayout::identity(grid);
        let other = CellLayout::identity(PixelGrid::new(2, 2).unwrap());
        let spec = PatternSpec::default();
        assert!(synthesize_uffsi_pattern(
            &layout,
            &compute_weights(&other),
            Frequency::DC,
            Phase::Zero,
            &spec
        )
        .is_err());
        assert!(
            synthesize_fsi_pattern(layout.lattice(), Frequency::new(3, 0), Phase::Zero, &spec)
                .is_err()
        );
        assert!(synthesize_fsi_pattern(
            layout.lattice(),
            Frequency::new(-2, 0),
            Phase::Zero,
            &spec
        )
        .is_err());
        assert!(PatternSpec::new(0.3, 0.5).is_err());
        assert!(PatternSpec::new(0.7, 0.5).is_err());
    }
}
