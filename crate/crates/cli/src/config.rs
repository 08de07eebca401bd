//! Run configuration: a versioned TOML document.
//!
//! ```toml
//! version = 1
//! seed = 7
//! out_dir = "out"
//!
//! [grid]
//! width = 128
//! height = 128
//!
//! [circular]            # or [rect], [rotrect], [identity]; exactly one
//! center = [64.5, 64.5]
//! r0 = 21.0
//! epsilon = 1.05
//! sectors = 96
//!
//! [sampling]            # exactly one of ratio, measurements, ratios
//! ratio = 0.25
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use uffsi_core::{
    build_circular_layout, build_rect_layout, build_rotrect_layout, Budget, CellLayout, ChartSpec,
    CircularParams, Frequency, NoiseConfig, PatternSpec, PixelGrid, RectParams, RotRectParams,
};

use crate::error::CliError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    version: u32,
    #[serde(default)]
    seed: u64,
    out_dir: Option<PathBuf>,
    grid: RawGrid,
    circular: Option<RawCircular>,
    rect: Option<RawRect>,
    rotrect: Option<RawRotRect>,
    identity: Option<RawIdentity>,
    #[serde(default)]
    sampling: RawSampling,
    #[serde(default)]
    pattern: RawPattern,
    noise: Option<RawNoise>,
    display: Option<RawDisplay>,
    compare: Option<RawCompare>,
    patterns: Option<RawPatterns>,
    chart: Option<RawChart>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    width: usize,
    height: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircular {
    /// Defaults to the grid center.
    center: Option<[f64; 2]>,
    r0: f64,
    epsilon: f64,
    sectors: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRect {
    /// Defaults to the central pixel.
    center: Option<[usize; 2]>,
    m0: usize,
    n0: usize,
    alpha1: f64,
    alpha2: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRotRect {
    center: Option<[usize; 2]>,
    m0: usize,
    n0: usize,
    alpha1: f64,
    alpha2: f64,
    theta_deg: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIdentity {}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampling {
    ratio: Option<f64>,
    measurements: Option<usize>,
    ratios: Option<RawRatios>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRatios {
    uffsi: f64,
    hr: f64,
    lr: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPattern {
    a: f64,
    b: f64,
}

impl Default for RawPattern {
    fn default() -> Self {
        let spec = PatternSpec::default();
        Self {
            a: spec.a,
            b: spec.b,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    sigma: f64,
    /// Defaults to the run seed.
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDisplay {
    sigma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCompare {
    lr_cells: Option<[usize; 2]>,
    roi_min: Option<[usize; 2]>,
    roi_max: Option<[usize; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPatterns {
    frequencies: Option<Vec<[i64; 2]>>,
    count: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChart {
    roi_min: Option<[usize; 2]>,
    roi_max: Option<[usize; 2]>,
    periods: Option<Vec<usize>>,
    digits: Option<String>,
}

/// Inclusive one-based corners.
pub type PixelBox = ((usize, usize), (usize, usize));

#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    Circular(CircularParams),
    Rect(RectParams),
    RotRect(RotRectParams),
    Identity,
}

impl Structure {
    pub fn build(&self, grid: PixelGrid) -> uffsi_core::Result<CellLayout> {
        match self {
            Structure::Circular(p) => build_circular_layout(p, grid),
            Structure::Rect(p) => build_rect_layout(p, grid),
            Structure::RotRect(p) => build_rotrect_layout(p, grid),
            Structure::Identity => Ok(CellLayout::identity(grid)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    Ratio(f64),
    Measurements(usize),
    Ratios { uffsi: f64, hr: f64, lr: f64 },
}

impl Sampling {
    /// Budget for a comparison on `pixels` pixels. A single ratio is read
    /// as the ratio of uniform full-resolution FSI, which fixes the budget
    /// shared by all arms.
    pub fn budget(&self, pixels: usize) -> Budget {
        match *self {
            Sampling::Ratio(sr) => {
                Budget::Measurements(4 * (sr * pixels as f64 / 2.0).floor() as usize)
            }
            Sampling::Measurements(n) => Budget::Measurements(n),
            Sampling::Ratios { uffsi, hr, lr } => Budget::Ratios { uffsi, hr, lr },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternSelection {
    Frequencies(Vec<Frequency>),
    /// The first `n` frequencies of the sampling plan.
    Leading(usize),
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub grid: PixelGrid,
    pub structure: Structure,
    pub sampling: Sampling,
    pub pattern: PatternSpec,
    pub noise: NoiseConfig,
    pub display_sigma: Option<f64>,
    pub lr_cells: Option<(usize, usize)>,
    pub roi_box: Option<PixelBox>,
    pub patterns: PatternSelection,
    pub chart: ChartSpec,
    /// SHA-256 of the config text and command-line overrides.
    pub hash: String,
}

fn invalid(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {reason}"))
}

fn pair(v: [usize; 2]) -> (usize, usize) {
    (v[0], v[1])
}

impl RunConfig {
    pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, seed_override).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str, seed_override: Option<u64>) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if raw.version != CONFIG_VERSION {
            return Err(invalid(
                "version",
                format!(
                    "unsupported version {}, expected {CONFIG_VERSION}",
                    raw.version
                ),
            ));
        }
        let grid =
            PixelGrid::new(raw.grid.width, raw.grid.height).map_err(|e| invalid("grid", e))?;
        let seed = seed_override.unwrap_or(raw.seed);

        let blocks = [
            raw.circular.is_some(),
            raw.rect.is_some(),
            raw.rotrect.is_some(),
            raw.identity.is_some(),
        ];
        let structure = match blocks.iter().filter(|&&b| b).count() {
            0 => {
                return Err(invalid(
                    "structure",
                    "one of [circular], [rect], [rotrect], [identity] is required",
                ))
            }
            1 => structure_from(&raw, grid)?,
            _ => {
                return Err(invalid(
                    "structure",
                    "only one of [circular], [rect], [rotrect], [identity] may be given",
                ))
            }
        };

        let s = &raw.sampling;
        let sampling = match (s.ratio, s.measurements, &s.ratios) {
            (Some(r), None, None) => {
                check_ratio("sampling.ratio", r)?;
                Sampling::Ratio(r)
            }
            (None, Some(n), None) => {
                if n < 4 {
                    return Err(invalid(
                        "sampling.measurements",
                        format!("need at least 4, got {n}"),
                    ));
                }
                Sampling::Measurements(n)
            }
            (None, None, Some(r)) => {
                check_ratio("sampling.ratios.uffsi", r.uffsi)?;
                check_ratio("sampling.ratios.hr", r.hr)?;
                check_ratio("sampling.ratios.lr", r.lr)?;
                Sampling::Ratios {
                    uffsi: r.uffsi,
                    hr: r.hr,
                    lr: r.lr,
                }
            }
            (None, None, None) => Sampling::Ratio(1.0),
            _ => {
                return Err(invalid(
                    "sampling",
                    "give only one of ratio, measurements, ratios",
                ))
            }
        };

        let pattern =
            PatternSpec::new(raw.pattern.a, raw.pattern.b).map_err(|e| invalid("pattern", e))?;
        let noise = match &raw.noise {
            None => NoiseConfig::None,
            Some(n) => {
                let cfg = NoiseConfig::Gaussian {
                    sigma: n.sigma,
                    seed: n.seed.unwrap_or(seed),
                };
                cfg.validate().map_err(|e| invalid("noise.sigma", e))?;
                cfg
            }
        };
        let display_sigma = match &raw.display {
            Some(d) if !(d.sigma.is_finite() && d.sigma > 0.0) => {
                return Err(invalid(
                    "display.sigma",
                    format!("must be > 0, got {}", d.sigma),
                ))
            }
            Some(d) => Some(d.sigma),
            None => None,
        };

        let (mut lr_cells, mut roi_box) = (None, None);
        if let Some(c) = &raw.compare {
            if let Some([x, y]) = c.lr_cells {
                if !(1..=grid.width()).contains(&x) || !(1..=grid.height()).contains(&y) {
                    return Err(invalid(
                        "compare.lr_cells",
                        format!("[{x}, {y}] must lie within the grid"),
                    ));
                }
                lr_cells = Some((x, y));
            }
            roi_box = match (c.roi_min, c.roi_max) {
                (Some(lo), Some(hi)) => Some(check_box("compare", grid, lo, hi)?),
                (None, None) => None,
                _ => return Err(invalid("compare", "roi_min and roi_max go together")),
            };
        }

        let patterns = match &raw.patterns {
            Some(RawPatterns {
                frequencies: Some(_),
                count: Some(_),
            }) => return Err(invalid("patterns", "give either frequencies or count")),
            Some(RawPatterns {
                frequencies: Some(list),
                ..
            }) => PatternSelection::Frequencies(
                list.iter().map(|&[u, v]| Frequency::new(u, v)).collect(),
            ),
            Some(RawPatterns { count: Some(n), .. }) => PatternSelection::Leading(*n),
            _ => PatternSelection::Leading(4),
        };

        let mut chart = ChartSpec::centered(grid);
        if let Some(c) = &raw.chart {
            match (c.roi_min, c.roi_max) {
                (Some(lo), Some(hi)) => {
                    let (lo, hi) = check_box("chart", grid, lo, hi)?;
                    chart.roi_min = lo;
                    chart.roi_max = hi;
                }
                (None, None) => {}
                _ => return Err(invalid("chart", "roi_min and roi_max go together")),
            }
            if let Some(p) = &c.periods {
                chart.periods = p.clone();
            }
            if let Some(d) = &c.digits {
                chart.digits = d.clone();
            }
        }

        Ok(Self {
            seed,
            out_dir: raw.out_dir,
            grid,
            structure,
            sampling,
            pattern,
            noise,
            display_sigma,
            lr_cells,
            roi_box,
            patterns,
            chart,
            hash: config_hash(text, seed),
        })
    }
}

fn check_ratio(field: &str, r: f64) -> Result<(), CliError> {
    if r.is_finite() && r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must lie in (0, 1], got {r}")))
    }
}

fn check_box(
    table: &str,
    grid: PixelGrid,
    lo: [usize; 2],
    hi: [usize; 2],
) -> Result<PixelBox, CliError> {
    let ok = lo[0] >= 1
        && lo[1] >= 1
        && lo[0] <= hi[0]
        && lo[1] <= hi[1]
        && hi[0] <= grid.width()
        && hi[1] <= grid.height();
    if !ok {
        return Err(invalid(
            &format!("{table}.roi_min/roi_max"),
            format!("{lo:?}-{hi:?} is not a box inside the {grid} grid"),
        ));
    }
    Ok((pair(lo), pair(hi)))
}

fn structure_from(raw: &RawConfig, grid: PixelGrid) -> Result<Structure, CliError> {
    let default_center = (grid.width().div_ceil(2), grid.height().div_ceil(2));
    let structure = if let Some(c) = &raw.circular {
        let center = c.center.map_or(
            (
                (grid.width() as f64 + 1.0) / 2.0,
                (grid.height() as f64 + 1.0) / 2.0,
            ),
            |[x, y]| (x, y),
        );
        let p = CircularParams {
            center,
            r0: c.r0,
            epsilon: c.epsilon,
            sectors: c.sectors,
        };
        p.validate(grid).map_err(|e| invalid("circular", e))?;
        Structure::Circular(p)
    } else if let Some(r) = &raw.rect {
        let p = RectParams {
            center: r.center.map_or(default_center, pair),
            m0: r.m0,
            n0: r.n0,
            alpha1: r.alpha1,
            alpha2: r.alpha2,
        };
        p.validate(grid).map_err(|e| invalid("rect", e))?;
        Structure::Rect(p)
    } else if let Some(r) = &raw.rotrect {
        let rect = RectParams {
            center: r.center.map_or(default_center, pair),
            m0: r.m0,
            n0: r.n0,
            alpha1: r.alpha1,
            alpha2: r.alpha2,
        };
        rect.validate(grid).map_err(|e| invalid("rotrect", e))?;
        let theta = r.theta_deg.to_radians();
        if !(theta.is_finite() && (0.0..std::f64::consts::FRAC_PI_2).contains(&theta)) {
            return Err(invalid(
                "rotrect.theta_deg",
                format!("must lie in [0, 90), got {}", r.theta_deg),
            ));
        }
        Structure::RotRect(RotRectParams { rect, theta })
    } else {
        Structure::Identity
    };
    Ok(structure)
}

fn config_hash(text: &str, seed: u64) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    h.update(seed.to_le_bytes());
    h.finalize()
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "version = 1\n[grid]\nwidth = 32\nheight = 24\n";

    fn parse(extra: &str) -> Result<RunConfig, CliError> {
        RunConfig::parse(&format!("{BASE}{extra}"), None)
    }

    #[test]
    fn minimal_identity() {
        let cfg = parse("[identity]\n").unwrap();
        assert_eq!(cfg.structure, Structure::Identity);
        assert_eq!(cfg.sampling, Sampling::Ratio(1.0));
        assert_eq!(cfg.noise, NoiseConfig::None);
    }

    #[test]
    fn structure_blocks_are_exclusive() {
        assert!(parse("").is_err());
        let err =
            parse("[identity]\n[rect]\nm0 = 2\nn0 = 2\nalpha1 = 1.5\nalpha2 = 1.5\n").unwrap_err();
        assert!(err.to_string().contains("only one"));
    }

    #[test]
    fn unknown_keys_fail_with_location() {
        let err = parse("[identity]\n[pattern]\na = 0.5\nb = 0.5\nc = 1\n").unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("unknown field") && msg.contains("line"),
            "{msg}"
        );
    }

    #[test]
    fn parameter_errors_name_the_field() {
        let err = parse("[circular]\nr0 = 0.5\nepsilon = 1.2\nsectors = 4\n").unwrap_err();
        assert!(err.to_string().starts_with("circular: "), "{err}");
        let err = parse("[rotrect]\nm0 = 2\nn0 = 2\nalpha1 = 1.5\nalpha2 = 1.5\ntheta_deg = 95\n")
            .unwrap_err();
        assert!(err.to_string().contains("theta_deg"), "{err}");
        let err = parse("[identity]\n[sampling]\nratio = 0.5\nmeasurements = 8\n").unwrap_err();
        assert!(err.to_string().contains("sampling"), "{err}");
        let err = parse("[identity]\n[pattern]\na = 0.2\nb = 0.5\n").unwrap_err();
        assert!(err.to_string().starts_with("pattern"), "{err}");
    }

    #[test]
    fn seed_override_changes_hash_and_noise_seed() {
        let text = format!("{BASE}[identity]\n[noise]\nsigma = 0.1\n");
        let a = RunConfig::parse(&text, None).unwrap();
        let b = RunConfig::parse(&text, Some(9)).unwrap();
        assert_ne!(a.hash, b.hash);
        assert_eq!(
            b.noise,
            NoiseConfig::Gaussian {
                sigma: 0.1,
                seed: 9
            }
        );
    }

    #[test]
    fn single_ratio_sets_a_shared_budget() {
        assert_eq!(
            Sampling::Ratio(0.19).budget(16384),
            Budget::Measurements(6224)
        );
    }
}
