//! Foveated Fourier single-pixel imaging.
//!
//! A scene on an `X × Y` pixel grid is partitioned into cells that are
//! single pixels inside a fovea and grow logarithmically outside it. Fourier
//! patterns are defined on the cell lattice and painted onto the pixels with
//! each cell's value divided by its pixel count, so a bucket detector
//! reading equals an ordinary Fourier measurement of the cell-averaged
//! scene. Four phase-shifted readings per frequency give one complex
//! coefficient; an inverse FFT over the lattice recovers the cell values.
//!
//! ```
//! use uffsi_core::{build_circular_layout, simulate, CircularParams, Image, NoiseConfig,
//!     PatternSpec, PixelGrid};
//!
//! let grid = PixelGrid::new(32, 32).unwrap();
//! let params = CircularParams { center: (16.5, 16.5), r0: 5.0, epsilon: 1.4, sectors: 12 };
//! let layout = build_circular_layout(&params, grid).unwrap();
//! let scene = Image::from_fn(grid, |x, y| ((x + y) % 2) as f64);
//! let sim = simulate(&scene, &layout, 0.5, &PatternSpec::default(), &NoiseConfig::None).unwrap();
//! assert_eq!(sim.measurements.len(), 4 * sim.plan.n_freq());
//! ```

mod binio;
pub mod chart;
pub mod compare;
mod error;
pub mod filter;
pub mod fourier;
pub mod geometry;
mod grid;
pub mod metrics;
pub mod pgm;
pub mod pipeline;
pub mod sensing;

pub use chart::{make_test_chart, ChartSpec};
pub use compare::{
    run_comparison, ArmRecord, Budget, Comparison, ComparisonConfig, ComparisonReport,
};
pub use error::{Error, Result};
pub use filter::smooth_nroi;
pub use fourier::{
    assemble_spectrum, make_frequency_plan, reconstruct, synthesize_fsi_pattern,
    synthesize_uffsi_pattern, Frequency, FrequencyPlan, PatternSpec, Phase, Spectrum,
};
pub use geometry::{
    build_circular_layout, build_rect_layout, build_rotrect_layout, build_uniform_layout,
    cell_average, compute_weights, expand_to_pixels, CellKind, CellLayout, CircularMeta,
    CircularParams, Lattice, RectMeta, RectParams, RotRectParams, StructureMeta, WeightVector,
};
pub use grid::{Image, PixelGrid};
pub use metrics::{mse, psnr, redundancy_reduction, ssim, RoiMask};
pub use pgm::Graymap;
pub use pipeline::{simulate, simulate_with_plan, Simulation};
pub use sensing::{measure, run_acquisition, MeasurementSet, NoiseConfig, Reading, Scene};
