//! Matched-budget comparison of foveated FSI against uniform high- and
//! low-resolution FSI on the same scene.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::fourier::{plan_for_lattice, plan_with_count, representative_count, PatternSpec};
use crate::geometry::{build_uniform_layout, CellLayout};
use crate::grid::Image;
use crate::metrics::{psnr, ssim, RoiMask};
use crate::pipeline::simulate_with_plan;
use crate::sensing::{NoiseConfig, Scene};

pub const ARM_UFFSI: &str = "uffsi";
pub const ARM_HR: &str = "fsi_hr";
pub const ARM_LR: &str = "fsi_lr";

/// How many measurements each arm receives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    /// The same number of readings for every arm, rounded down to whole
    /// frequencies.
    Measurements(usize),
    /// A sampling ratio per arm; readings follow `4 · floor(sr · N / 2)`.
    Ratios { uffsi: f64, hr: f64, lr: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonConfig {
    pub budget: Budget,
    pub spec: PatternSpec,
    pub noise: NoiseConfig,
    /// Cell grid of the low-resolution arm. `None` picks the grid with the
    /// frame's aspect ratio whose cell count is closest to the foveated
    /// layout's.
    pub lr_cells: Option<(usize, usize)>,
    pub seed: u64,
    /// Identifier of the configuration that produced this run. When absent
    /// a hash of the fields above is used.
    pub config_hash: Option<String>,
}

impl ComparisonConfig {
    pub fn new(budget: Budget) -> Self {
        Self {
            budget,
            spec: PatternSpec::default(),
            noise: NoiseConfig::None,
            lr_cells: None,
            seed: 0,
            config_hash: None,
        }
    }

    fn hash(&self) -> String {
        if let Some(h) = &self.config_hash {
            return h.clone();
        }
        // FNV-1a over the debug form; stable for a given build.
        let text = format!(
            "{:?}",
            (self.budget, self.spec, self.noise, self.lr_cells, self.seed)
        );
        let h = text.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
        });
        format!("{h:016x}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmRecord {
    pub name: String,
    /// Non-empty cells; equals `pixels` for the high-resolution arm.
    pub cells: usize,
    pub lattice_points: usize,
    pub pixels: usize,
    pub sampling_ratio: f64,
    pub n_measurements: usize,
    pub roi_psnr: f64,
    /// `NaN` when the ROI holds no complete SSIM window.
    pub roi_ssim: f64,
    pub global_psnr: f64,
    pub redundancy: f64,
    /// Whether the requested budget exceeded full sampling.
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub arms: Vec<ArmRecord>,
    pub seed: u64,
    pub config_hash: String,
    pub scene_id: String,
    pub roi_note: String,
    pub roi_pixels: usize,
    pub warnings: Vec<String>,
}

impl ComparisonReport {
    pub fn arm(&self, name: &str) -> Option<&ArmRecord> {
        self.arms.iter().find(|a| a.name == name)
    }

    /// Sampling ratio of the uniform high-resolution arm.
    pub fn sr_fsi_hr(&self) -> Option<f64> {
        self.arm(ARM_HR).map(|a| a.sampling_ratio)
    }

    pub fn sr_uffsi(&self) -> Option<f64> {
        self.arm(ARM_UFFSI).map(|a| a.sampling_ratio)
    }

    pub const CSV_HEADER: &'static str = "arm,cells,lattice_points,pixels,sampling_ratio,\
n_measurements,roi_psnr_db,roi_ssim,global_psnr_db,redundancy,clamped";

    /// Provenance lines prefixed with `#`, then one row per arm.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# seed={}", self.seed)?;
        writeln!(w, "# config_hash={}", self.config_hash)?;
        writeln!(w, "# scene={}", self.scene_id)?;
        writeln!(w, "# roi={} ({} pixels)", self.roi_note, self.roi_pixels)?;
        for warning in &self.warnings {
            writeln!(w, "# warning={warning}")?;
        }
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for a in &self.arms {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{}",
                a.name,
                a.cells,
                a.lattice_points,
                a.pixels,
                a.sampling_ratio,
                a.n_measurements,
                fmt_metric(a.roi_psnr),
                fmt_metric(a.roi_ssim),
                fmt_metric(a.global_psnr),
                a.redundancy,
                a.clamped
            )?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scene: {}", self.scene_id);
        let _ = writeln!(s, "roi: {} ({} pixels)", self.roi_note, self.roi_pixels);
        let _ = writeln!(s, "seed: {}  config: {}", self.seed, self.config_hash);
        if let Some(sr) = self.sr_fsi_hr() {
            let _ = writeln!(s, "Sr_FSI_HR: {sr:.4}");
        }
        if let Some(sr) = self.sr_uffsi() {
            let _ = writeln!(s, "Sr_UFFSI: {sr:.4}");
        }
        let _ = writeln!(
            s,
            "{:<8} {:>9} {:>9} {:>8} {:>8} {:>12} {:>9} {:>11} {:>10}",
            "arm",
            "cells",
            "pixels",
            "Sr",
            "meas.",
            "ROI PSNR dB",
            "ROI SSIM",
            "PSNR dB",
            "redund."
        );
        for a in &self.arms {
            let _ = writeln!(
                s,
                "{:<8} {:>9} {:>9} {:>8.4} {:>8} {:>12} {:>9} {:>11} {:>9.1}%",
                a.name,
                a.cells,
                a.pixels,
                a.sampling_ratio,
                a.n_measurements,
                fmt_fixed(a.roi_psnr, 2),
                fmt_fixed(a.roi_ssim, 4),
                fmt_fixed(a.global_psnr, 2),
                100.0 * a.redundancy
            );
        }
        for warning in &self.warnings {
            let _ = writeln!(s, "warning: {warning}");
        }
        s
    }
}

fn fmt_metric(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

fn fmt_fixed(v: f64, digits: usize) -> String {
    if v.is_finite() {
        format!("{v:.digits$}")
    } else {
        fmt_metric(v)
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub report: ComparisonReport,
    /// Reconstructions in arm order, all on the scene's pixel grid.
    pub images: Vec<(String, Image)>,
}

/// Cell grid with the frame's aspect ratio and about `cells` cells.
pub fn lr_grid_for(width: usize, height: usize, cells: usize) -> (usize, usize) {
    let cx =
        ((cells as f64 * width as f64 / height as f64).sqrt().round() as usize).clamp(1, width);
    let cy = ((cells as f64 / cx as f64).round() as usize).clamp(1, height);
    (cx, cy)
}

/// Runs the foveated arm on `layout`, uniform FSI on every pixel, and
/// uniform FSI on a coarse block grid (a box-averaged scene shown at full
/// size), and scores each reconstruction against the scene.
pub fn run_comparison(
    scene: &Scene,
    roi: &RoiMask,
    layout: &CellLayout,
    config: &ComparisonConfig,
) -> Result<Comparison> {
    let grid = layout.grid();
    scene.image.check_grid(grid)?;
    if roi.grid() != grid {
        return Err(Error::dims(grid.to_string(), roi.grid().to_string()));
    }
    if let Budget::Measurements(b) = config.budget {
        if b < 4 {
            return Err(Error::param(
                "budget",
                format!("need at least 4 measurements, got {b}"),
            ));
        }
    }

    let (lx, ly) = config
        .lr_cells
        .unwrap_or_else(|| lr_grid_for(grid.width(), grid.height(), layout.cell_count()));
    let arms = [
        (ARM_UFFSI, layout.clone()),
        (ARM_HR, CellLayout::identity(grid)),
        (ARM_LR, build_uniform_layout(grid, lx, ly)?),
    ];

    let mut warnings = Vec::new();
    let mut records = Vec::new();
    let mut images = Vec::new();
    for (name, arm_layout) in arms {
        let lattice = arm_layout.lattice();
        let reps = representative_count(lattice);
        let (plan, clamped) = match config.budget {
            Budget::Measurements(b) => {
                let want = b / 4;
                let clamped = want > reps;
                if clamped {
                    warnings.push(format!(
                        "{name}: budget of {b} exceeds full sampling ({} readings); clamped",
                        4 * reps
                    ));
                }
                (plan_with_count(lattice, want.min(reps))?, clamped)
            }
            Budget::Ratios { uffsi, hr, lr } => {
                let sr = match name {
                    ARM_UFFSI => uffsi,
                    ARM_HR => hr,
                    _ => lr,
                };
                (plan_for_lattice(lattice, sr)?, false)
            }
        };
        let sim = simulate_with_plan(&scene.image, &arm_layout, plan, &config.spec, &config.noise)?;
        let roi_ssim = match ssim(&sim.image, &scene.image, roi) {
            Ok(v) => v,
            Err(Error::Mask(_)) => f64::NAN,
            Err(e) => return Err(e),
        };
        records.push(ArmRecord {
            name: name.to_string(),
            cells: arm_layout.cell_count(),
            lattice_points: lattice.len(),
            pixels: grid.len(),
            sampling_ratio: sim.plan.ratio(),
            n_measurements: sim.plan.n_measurements(),
            roi_psnr: psnr(&sim.image, &scene.image, roi)?,
            roi_ssim,
            global_psnr: psnr(&sim.image, &scene.image, &RoiMask::full(grid))?,
            redundancy: arm_layout.redundancy_reduction(),
            clamped,
        });
        images.push((name.to_string(), sim.image));
    }

    if records.iter().any(|r| r.roi_ssim.is_nan()) {
        warnings.push("ROI holds no complete 8x8 window; SSIM not reported".into());
    }
    let lo = records.iter().map(|r| r.n_measurements).min().unwrap_or(0);
    let hi = records.iter().map(|r| r.n_measurements).max().unwrap_or(0);
    if lo > 0 && (hi - lo) as f64 > 0.005 * lo as f64 {
        warnings.push(format!(
            "arm budgets differ by {:.1}% ({lo} to {hi} readings)",
            100.0 * (hi - lo) as f64 / lo as f64
        ));
    }

    Ok(Comparison {
        report: ComparisonReport {
            arms: records,
            seed: config.seed,
            config_hash: config.hash(),
            scene_id: scene.id.clone(),
            roi_note: roi.note().to_string(),
            roi_pixels: roi.count(),
            warnings,
        },
        images,
    })
}
