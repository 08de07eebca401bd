//! End-to-end simulation: plan, acquire, assemble, reconstruct.

use crate::error::Result;
use crate::fourier::{
    assemble_spectrum, make_frequency_plan, reconstruct_lattice, FrequencyPlan, PatternSpec,
    Spectrum,
};
use crate::geometry::{compute_weights, expand_to_pixels, CellLayout};
use crate::grid::Image;
use crate::sensing::{run_acquisition, MeasurementSet, NoiseConfig};

#[derive(Debug, Clone)]
pub struct Simulation {
    pub plan: FrequencyPlan,
    pub measurements: MeasurementSet,
    pub spectrum: Spectrum,
    /// Reconstructed cell values on the transform lattice.
    pub lattice_values: Vec<f64>,
    /// The same values painted back onto the pixel grid.
    pub image: Image,
    pub imag_residue: f64,
}

pub fn simulate(
    scene: &Image,
    layout: &CellLayout,
    sr: f64,
    spec: &PatternSpec,
    noise: &NoiseConfig,
) -> Result<Simulation> {
    let plan = make_frequency_plan(layout, sr)?;
    simulate_with_plan(scene, layout, plan, spec, noise)
}

pub fn simulate_with_plan(
    scene: &Image,
    layout: &CellLayout,
    plan: FrequencyPlan,
    spec: &PatternSpec,
    noise: &NoiseConfig,
) -> Result<Simulation> {
    let weights = compute_weights(layout);
    let measurements = run_acquisition(scene, layout, &weights, &plan, spec, noise)?;
    let spectrum = assemble_spectrum(&measurements, &plan, spec)?;
    let rec = reconstruct_lattice(&spectrum);
    let image = expand_to_pixels(&rec.values, layout)?;
    Ok(Simulation {
        plan,
        measurements,
        spectrum,
        lattice_values: rec.values,
        image,
        imag_residue: rec.imag_residue,
    })
}
