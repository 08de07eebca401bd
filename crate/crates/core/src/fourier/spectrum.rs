use rustfft::num_complex::Complex64;

use super::pattern::PatternSpec;
use super::plan::FrequencyPlan;
use crate::error::{Error, Result};
use crate::geometry::{expand_to_pixels, CellLayout, Lattice};
use crate::grid::Image;
use crate::sensing::MeasurementSet;

/// Complex coefficients over the whole lattice, conjugate-symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    lattice: Lattice,
    coeffs: Vec<Complex64>,
    measured: Vec<bool>,
}

impl Spectrum {
    pub fn new(lattice: Lattice, coeffs: Vec<Complex64>, measured: Vec<bool>) -> Result<Self> {
        if coeffs.len() != lattice.len() || measured.len() != lattice.len() {
            return Err(Error::dims(
                format!("{} coefficients", lattice.len()),
                format!(
                    "{} coefficients, {} mask entries",
                    coeffs.len(),
                    measured.len()
                ),
            ));
        }
        Ok(Self {
            lattice,
            coeffs,
            measured,
        })
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Whether each entry came from a measurement (directly or as a
    /// conjugate partner) rather than zero filling.
    pub fn measured_mask(&self) -> &[bool] {
        &self.measured
    }

    /// Largest `|C(-k) - conj(C(k))|` over the lattice.
    pub fn symmetry_defect(&self) -> f64 {
        let (nu, nv) = self.lattice.dims();
        let mut worst = 0.0f64;
        for v in 0..nv {
            for u in 0..nu {
                let neg = ((nv - v) % nv) * nu + (nu - u) % nu;
                let d = self.coeffs[neg] - self.coeffs[v * nu + u].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }
}

/// Combines the four phase-shifted readings of each planned frequency into
/// `C = [(S_0 - S_π) + j (S_π/2 - S_3π/2)] / (2b)`, which equals the
/// unnormalized forward transform of the cell-averaged scene. Conjugate
/// partners are filled by symmetry; self-conjugate entries keep only their
/// real part. Unplanned entries stay zero.
pub fn assemble_spectrum(
    measurements: &MeasurementSet,
    plan: &FrequencyPlan,
    spec: &PatternSpec,
) -> Result<Spectrum> {
    spec.validate()?;
    let lattice = plan.lattice();
    if measurements.lattice() != lattice {
        return Err(Error::IncompleteMeasurements(format!(
            "readings were taken on {:?}, plan is for {:?}",
            measurements.lattice(),
            lattice
        )));
    }
    if measurements.frequencies() != plan.frequencies() {
        return Err(Error::IncompleteMeasurements(format!(
            "{} frequencies measured, plan has {}",
            measurements.frequencies().len(),
            plan.n_freq()
        )));
    }

    let mut coeffs = vec![Complex64::default(); lattice.len()];
    let mut measured = vec![false; lattice.len()];
    let scale = 1.0 / (2.0 * spec.b);
    for (f, s) in plan.frequencies().iter().zip(measurements.readings()) {
        let c = Complex64::new(s[0] - s[2], s[1] - s[3]) * scale;
        let idx = f.index(lattice);
        let neg = f.negated(lattice).index(lattice);
        if idx == neg {
            coeffs[idx] = Complex64::new(c.re, 0.0);
        } else {
            coeffs[idx] = c;
            coeffs[neg] = c.conj();
            measured[neg] = true;
        }
        measured[idx] = true;
    }
    Spectrum::new(lattice, coeffs, measured)
}

/// Inverse-transformed lattice image.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub values: Vec<f64>,
    /// Largest imaginary magnitude discarded when taking the real part.
    pub imag_residue: f64,
}

pub fn reconstruct_lattice(spectrum: &Spectrum) -> Reconstruction {
    let lattice = spectrum.lattice();
    let mut buf = spectrum.coeffs().to_vec();
    super::inverse(lattice, &mut buf);
    let norm = 1.0 / lattice.len() as f64;
    let imag_residue = buf.iter().fold(0.0f64, |m, z| m.max((z.im * norm).abs()));
    Reconstruction {
        values: buf.iter().map(|z| z.re * norm).collect(),
        imag_residue,
    }
}

/// Inverse transform followed by painting every pixel with its cell value.
pub fn reconstruct(spectrum: &Spectrum, layout: &CellLayout) -> Result<Image> {
    if spectrum.lattice() != layout.lattice() {
        return Err(Error::dims(
            format!("{:?}", layout.lattice()),
            format!("{:?}", spectrum.lattice()),
        ));
    }
    expand_to_pixels(&reconstruct_lattice(spectrum).values, layout)
}
