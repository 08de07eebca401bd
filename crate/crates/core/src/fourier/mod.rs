//! Fourier basis patterns, frequency planning, spectrum assembly and
//! reconstruction on a layout lattice.
//!
//! Conventions: the forward transform is unnormalized with kernel
//! `exp(-j 2π k·n)`, the inverse carries the `1 / N_lattice` factor.

mod fft;
pub mod io;
mod pattern;
mod plan;
mod spectrum;

pub use pattern::{
    cell_phasors, synthesize_fsi_pattern, synthesize_uffsi_pattern, PatternSpec, Phase, Twiddles,
};
pub use plan::{
    frequency_count, make_frequency_plan, plan_for_lattice, plan_with_count, representative_count,
    Frequency, FrequencyPlan,
};
pub use spectrum::{assemble_spectrum, reconstruct, reconstruct_lattice, Reconstruction, Spectrum};

pub(crate) use fft::inverse;
