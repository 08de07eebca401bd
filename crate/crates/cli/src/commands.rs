use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use uffsi_core::fourier::io::{pattern_file_name, pattern_graymap, write_plan_csv};
use uffsi_core::fourier::{plan_for_lattice, plan_with_count, representative_count};
use uffsi_core::geometry::io::{cell_map, layout_summary, write_layout};
use uffsi_core::sensing::write_measurements_csv;
use uffsi_core::{
    compute_weights, make_test_chart, psnr, run_comparison, simulate_with_plan, smooth_nroi, ssim,
    synthesize_uffsi_pattern, CellLayout, ComparisonConfig, Frequency, FrequencyPlan, Graymap,
    Image, Lattice, Phase, RoiMask, Scene,
};

use crate::config::{PatternSelection, RunConfig, Sampling};
use crate::error::CliError;
use crate::scene::load_scene;

pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
}

impl Context {
    pub fn new(config: RunConfig, out: Option<PathBuf>) -> Self {
        let out = out
            .or_else(|| config.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from("out"));
        Self { config, out }
    }

    fn layout(&self) -> Result<CellLayout, CliError> {
        Ok(self.config.structure.build(self.config.grid)?)
    }

    fn scene(&self, path: Option<&Path>) -> Result<Scene, CliError> {
        match path {
            Some(p) => {
                let (scene, warnings) = load_scene(p, self.config.grid)?;
                warnings.iter().for_each(|w| warn(w));
                Ok(scene)
            }
            None => Ok(make_test_chart(self.config.grid, &self.config.chart)
                .map_err(|e| CliError::Config(format!("chart: {e}")))?),
        }
    }

    /// Sampling plan for a single-layout run.
    fn plan(&self, lattice: Lattice) -> Result<FrequencyPlan, CliError> {
        match self.config.sampling {
            Sampling::Ratio(sr) => Ok(plan_for_lattice(lattice, sr)?),
            Sampling::Ratios { uffsi, .. } => Ok(plan_for_lattice(lattice, uffsi)?),
            Sampling::Measurements(n) => {
                let reps = representative_count(lattice);
                if n / 4 > reps {
                    warn(&format!(
                        "{n} measurements exceed full sampling ({}); clamped",
                        4 * reps
                    ));
                }
                Ok(plan_with_count(lattice, (n / 4).min(reps))?)
            }
        }
    }

    fn create_out(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", self.out.display())))
    }

    fn write(
        &self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
    ) -> Result<(), CliError> {
        let path = self.out.join(name);
        let file = File::create(&path)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        f(&mut w)?;
        w.flush()
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
    }

    fn write_pgm(&self, name: &str, map: &Graymap) -> Result<(), CliError> {
        self.write(name, |w| Ok(map.write(w)?))
    }
}

pub fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

/// Reconstructions on the fixed scene scale `[0, 1]`.
fn image_pgm(img: &Image) -> Graymap {
    Graymap::from_image_range(img, 0.0, 1.0)
}

pub fn layout(ctx: &Context) -> Result<(), CliError> {
    let layout = ctx.layout()?;
    let summary = format!("{}config: {}\n", layout_summary(&layout), ctx.config.hash);
    ctx.create_out()?;
    ctx.write("layout.bin", |w| Ok(write_layout(&layout, w)?))?;
    ctx.write_pgm("cellmap.pgm", &cell_map(&layout))?;
    ctx.write("summary.txt", |w| Ok(w.write_all(summary.as_bytes())?))?;
    print!("{summary}");
    Ok(())
}

pub fn patterns(ctx: &Context, cli_freqs: &[Frequency]) -> Result<(), CliError> {
    let layout = ctx.layout()?;
    let lattice = layout.lattice();
    let freqs: Vec<Frequency> = if !cli_freqs.is_empty() {
        cli_freqs.to_vec()
    } else {
        match &ctx.config.patterns {
            PatternSelection::Frequencies(list) => list.clone(),
            PatternSelection::Leading(n) => {
                let plan = ctx.plan(lattice)?;
                plan.frequencies().iter().take(*n).copied().collect()
            }
        }
    };
    let (nu, nv) = lattice.dims();
    for f in &freqs {
        let ok = |k: i64, n: usize| 2 * k > -(n as i64) && 2 * k <= n as i64;
        if !ok(f.ku, nu) || !ok(f.kv, nv) {
            return Err(CliError::Config(format!(
                "frequency ({}, {}) lies outside the {nu}x{nv} lattice",
                f.ku, f.kv
            )));
        }
    }
    let weights = compute_weights(&layout);
    let mut rendered = Vec::new();
    for &f in &freqs {
        for phase in Phase::ALL {
            let p = synthesize_uffsi_pattern(&layout, &weights, f, phase, &ctx.config.pattern)?;
            rendered.push((pattern_file_name(f, phase), pattern_graymap(&p)));
        }
    }
    ctx.create_out()?;
    for (name, map) in &rendered {
        ctx.write_pgm(name, map)?;
    }
    println!(
        "{} patterns written to {}",
        rendered.len(),
        ctx.out.display()
    );
    Ok(())
}

pub fn simulate(ctx: &Context, scene_path: Option<&Path>) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let layout = ctx.layout()?;
    let scene = ctx.scene(scene_path)?;
    let plan = ctx.plan(layout.lattice())?;
    let sim = simulate_with_plan(&scene.image, &layout, plan, &cfg.pattern, &cfg.noise)?;
    let display = match cfg.display_sigma {
        Some(sigma) => smooth_nroi(&sim.image, &layout, sigma)?,
        None => sim.image.clone(),
    };

    let full = RoiMask::full(cfg.grid);
    let roi = match cfg.roi_box {
        Some((lo, hi)) => RoiMask::from_box(cfg.grid, lo, hi)?,
        None => RoiMask::from_fovea(&layout).unwrap_or_else(|_| full.clone()),
    };
    let ssim_or_nan = |mask: &RoiMask| ssim(&sim.image, &scene.image, mask).unwrap_or(f64::NAN);
    let rows: Vec<(&str, String)> = vec![
        ("structure", layout.meta().name().to_string()),
        ("cells", layout.cell_count().to_string()),
        ("lattice_points", layout.lattice().len().to_string()),
        ("pixels", cfg.grid.len().to_string()),
        ("sampling_ratio", sim.plan.ratio().to_string()),
        ("n_measurements", sim.plan.n_measurements().to_string()),
        ("redundancy", layout.redundancy_reduction().to_string()),
        ("psnr_db", fmt(psnr(&sim.image, &scene.image, &full)?)),
        ("ssim", fmt(ssim_or_nan(&full))),
        ("roi_pixels", roi.count().to_string()),
        ("roi_psnr_db", fmt(psnr(&sim.image, &scene.image, &roi)?)),
        ("roi_ssim", fmt(ssim_or_nan(&roi))),
        ("imag_residue", format!("{:e}", sim.imag_residue)),
    ];

    ctx.create_out()?;
    ctx.write_pgm("reconstruction.pgm", &image_pgm(&sim.image))?;
    ctx.write_pgm(
        "reconstruction_display.pgm",
        &Graymap::from_image_normalized(&display),
    )?;
    ctx.write("plan.csv", |w| Ok(write_plan_csv(&sim.plan, w)?))?;
    ctx.write("measurements.csv", |w| {
        Ok(write_measurements_csv(&sim.measurements, w)?)
    })?;
    ctx.write("metrics.csv", |w| {
        writeln!(w, "# seed={}", cfg.seed)?;
        writeln!(w, "# config_hash={}", cfg.hash)?;
        writeln!(w, "# scene={}", scene.id)?;
        writeln!(w, "# roi={}", roi.note())?;
        writeln!(w, "metric,value")?;
        for (k, v) in &rows {
            writeln!(w, "{k},{v}")?;
        }
        Ok(())
    })?;
    for (k, v) in &rows {
        println!("{k}: {v}");
    }
    Ok(())
}

pub fn compare(ctx: &Context, scene_path: Option<&Path>) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let layout = ctx.layout()?;
    let scene = ctx.scene(scene_path)?;
    let roi = match cfg.roi_box {
        Some((lo, hi)) => RoiMask::from_box(cfg.grid, lo, hi)?,
        None => RoiMask::from_fovea(&layout).map_err(|_| {
            CliError::Config("layout has no fovea cells; set compare.roi_min/roi_max".into())
        })?,
    };
    let config = ComparisonConfig {
        budget: cfg.sampling.budget(cfg.grid.len()),
        spec: cfg.pattern,
        noise: cfg.noise,
        lr_cells: cfg.lr_cells,
        seed: cfg.seed,
        config_hash: Some(cfg.hash.clone()),
    };
    let cmp = run_comparison(&scene, &roi, &layout, &config)?;

    ctx.create_out()?;
    ctx.write("report.csv", |w| Ok(cmp.report.write_csv(w)?))?;
    let text = cmp.report.to_text();
    ctx.write("report.txt", |w| Ok(w.write_all(text.as_bytes())?))?;
    ctx.write_pgm("scene.pgm", &image_pgm(&scene.image))?;
    for (name, img) in &cmp.images {
        ctx.write_pgm(&format!("recon_{name}.pgm"), &image_pgm(img))?;
        if name == uffsi_core::compare::ARM_UFFSI {
            if let Some(sigma) = cfg.display_sigma {
                let shown = smooth_nroi(img, &layout, sigma)?;
                ctx.write_pgm(&format!("recon_{name}_display.pgm"), &image_pgm(&shown))?;
            }
        }
    }
    print!("{text}");
    Ok(())
}

pub fn chart(ctx: &Context) -> Result<(), CliError> {
    let scene = ctx.scene(None)?;
    ctx.create_out()?;
    ctx.write_pgm("chart.pgm", &image_pgm(&scene.image))?;
    println!("{}", scene.id);
    Ok(())
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        v.to_string()
    }
}
