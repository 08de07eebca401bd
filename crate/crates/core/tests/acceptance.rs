//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use uffsi_core::fourier::frequency_count;
use uffsi_core::{
    build_circular_layout, build_rect_layout, build_rotrect_layout, compute_weights,
    make_test_chart, measure, mse, redundancy_reduction, run_comparison, simulate,
    synthesize_uffsi_pattern, Budget, CellKind, CellLayout, ChartSpec, CircularParams,
    ComparisonConfig, Image, Lattice, NoiseConfig, PatternSpec, PixelGrid, RectParams, RoiMask,
    RotRectParams, Scene,
};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn measurement_counts() -> Check {
    let cases = [
        (
            Lattice::Plane {
                width: 341,
                height: 255,
            },
            0.07,
            12172,
        ),
        (
            Lattice::Plane {
                width: 1024,
                height: 768,
            },
            0.0084,
            13212,
        ),
        (
            Lattice::Plane {
                width: 341,
                height: 256,
            },
            0.07,
            12220,
        ),
    ];
    let mut got = Vec::new();
    for (lattice, sr, expected) in cases {
        let n = 4 * frequency_count(lattice, sr).map_err(|e| e.to_string())?;
        ensure!(
            n == expected,
            "N = {}, Sr = {sr}: {n} != {expected}",
            lattice.len()
        );
        got.push(n.to_string());
    }
    Ok(got.join(" / "))
}

fn redundancy_arithmetic() -> Check {
    let small = redundancy_reduction(16384, 3817).map_err(|e| e.to_string())?;
    let large = redundancy_reduction(786432, 86955).map_err(|e| e.to_string())?;
    let (a, b, c) = (
        format!("{:.1}%", 100.0 * small),
        format!("{:.1}%", 100.0 * large),
        format!("{:.0}%", 100.0 * large),
    );
    ensure!(a == "76.7%", "(16384, 3817) -> {a}");
    ensure!(b == "88.9%" && c == "89%", "(786432, 86955) -> {b} / {c}");
    Ok(format!("{a}, {b} ({c})"))
}

fn nwd_identity() -> Check {
    let mut rng = rng(3);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let structure = STRUCTURES[case % 3];
        let grid = random_grid(&mut rng, 64, 64);
        let layout = random_layout(&mut rng, structure, grid);
        let scene = random_scene(&mut rng, grid);
        let f = random_frequency(&mut rng, layout.lattice());
        let phase = random_phase(&mut rng);
        let b = rng.random_range(0.05..0.5);
        let a = rng.random_range(b..=1.0 - b);
        let spec = PatternSpec::new(a, b).unwrap();

        let weights = compute_weights(&layout);
        let pattern = synthesize_uffsi_pattern(&layout, &weights, f, phase, &spec).unwrap();
        let bucket = measure(&scene, &pattern).unwrap();

        let means = cell_means(&scene, &layout);
        let cell_sum: f64 = (0..layout.lattice().len())
            .filter(|&n| layout.cell_sizes()[n] > 0)
            .map(|n| fsi_value(layout.lattice(), f, phase, a, b, n) * means[n])
            .sum();
        let rel = (bucket - cell_sum).abs() / cell_sum.abs();
        worst = worst.max(rel);
        ensure!(
            rel <= 1e-12,
            "case {case} ({structure:?}, {grid}, {f:?}): relative error {rel:e}"
        );
    }
    Ok(format!("50 cases, worst relative error {worst:.1e}"))
}

fn full_sampling_oracle() -> Check {
    let mut rng = rng(4);
    let grid = PixelGrid::new(32, 32).unwrap();
    let mut worst = 0.0f64;
    for structure in STRUCTURES {
        for case in 0..20 {
            let layout = random_layout(&mut rng, structure, grid);
            let scene = random_scene(&mut rng, grid);
            let sim = simulate(
                &scene,
                &layout,
                1.0,
                &PatternSpec::default(),
                &NoiseConfig::None,
            )
            .map_err(|e| e.to_string())?;
            let oracle = paint(&cell_means(&scene, &layout), &layout);
            let err = max_abs_diff(sim.image.as_slice(), &oracle);
            worst = worst.max(err);
            ensure!(err < 1e-9, "{structure:?} case {case}: max error {err:e}");
        }
    }
    Ok(format!("60 runs, worst max error {worst:.1e}"))
}

fn degeneracy() -> Check {
    let mut rng = rng(5);
    let mut worst = 0.0f64;
    for (w, h) in [(32, 32), (24, 17), (9, 40)] {
        let grid = PixelGrid::new(w, h).unwrap();
        let scene = random_scene(&mut rng, grid);
        let sim = simulate(
            &scene,
            &CellLayout::identity(grid),
            1.0,
            &PatternSpec::default(),
            &NoiseConfig::None,
        )
        .map_err(|e| e.to_string())?;
        let err = max_abs_diff(sim.image.as_slice(), scene.as_slice());
        worst = worst.max(err);
        ensure!(err < 1e-9, "identity {grid}: max error {err:e}");
    }
    for draw in 0..10 {
        let grid = random_grid(&mut rng, 64, 64);
        let rect = random_rect(&mut rng, grid);
        let a = build_rect_layout(&rect, grid).unwrap();
        let b = build_rotrect_layout(&RotRectParams { rect, theta: 0.0 }, grid).unwrap();
        ensure!(
            a.lattice() == b.lattice()
                && a.pixel_to_cell() == b.pixel_to_cell()
                && a.cell_sizes() == b.cell_sizes()
                && a.kinds() == b.kinds(),
            "draw {draw}: rotated layout at 0 differs from {rect:?}"
        );
    }
    Ok(format!(
        "identity worst error {worst:.1e}; 10 zero-angle draws identical"
    ))
}

fn partition_fuzz() -> Check {
    let mut rng = rng(6);
    for draw in 0..200 {
        let structure = STRUCTURES[draw % 3];
        let grid = random_grid(&mut rng, 128, 128);
        let layout = random_layout(&mut rng, structure, grid);
        let n = layout.lattice().len();
        let p2c = layout.pixel_to_cell();
        ensure!(
            p2c.len() == grid.len(),
            "draw {draw}: {} assignments for {grid}",
            p2c.len()
        );
        let mut count = vec![0u32; n];
        for &c in p2c {
            ensure!(
                (c as usize) < n,
                "draw {draw}: cell {c} outside lattice of {n}"
            );
            count[c as usize] += 1;
        }
        ensure!(
            count == layout.cell_sizes(),
            "draw {draw}: cell sizes disagree with assignment"
        );
        let weights = compute_weights(&layout);
        for (i, (&size, &kind)) in count.iter().zip(layout.kinds()).enumerate() {
            let w = weights.values()[i];
            if size == 0 {
                ensure!(
                    kind == CellKind::Empty && w == 0.0,
                    "draw {draw}: empty cell {i} tagged {kind:?}"
                );
            } else {
                ensure!(
                    kind != CellKind::Empty,
                    "draw {draw}: occupied cell {i} tagged empty"
                );
                ensure!(
                    weights.denominator(i) == size,
                    "draw {draw}: cell {i} denominator"
                );
                ensure!(
                    (w * f64::from(size) - 1.0).abs() <= f64::EPSILON,
                    "draw {draw}: w * |cell| = {}",
                    w * f64::from(size)
                );
            }
        }
        ensure!(
            layout.cell_count() == count.iter().filter(|&&c| c > 0).count(),
            "draw {draw}: cell count"
        );
    }
    Ok("200 draws".into())
}

/// Circular layout of roughly 3.9k cells on 128×128 and a chart whose
/// detailed box sits inside its fovea.
fn desk_setup() -> (Scene, CellLayout) {
    let grid = PixelGrid::new(128, 128).unwrap();
    let params = CircularParams {
        center: (64.5, 64.5),
        r0: 21.0,
        epsilon: 1.05,
        sectors: 96,
    };
    let layout = build_circular_layout(&params, grid).unwrap();
    (desk_chart(grid, 14), layout)
}

fn desk_chart(grid: PixelGrid, half: usize) -> Scene {
    let spec = ChartSpec {
        roi_min: (65 - half, 65 - half),
        roi_max: (64 + half, 64 + half),
        periods: vec![2, 3, 4, 5],
        digits: "2024".into(),
    };
    make_test_chart(grid, &spec).unwrap()
}

fn effective_sampling() -> Check {
    const ANCHOR_DB: f64 = 2.0;
    let (scene, layout) = desk_setup();
    let redundancy = layout.redundancy_reduction();
    ensure!(redundancy >= 0.7, "redundancy {redundancy:.3} < 0.7");
    let roi = RoiMask::from_fovea(&layout).unwrap();
    let budget = (2.0f64 * 16384.0 * 0.19).round() as usize;
    let cmp = run_comparison(
        &scene,
        &roi,
        &layout,
        &ComparisonConfig::new(Budget::Measurements(budget)),
    )
    .map_err(|e| e.to_string())?;
    let r = &cmp.report;
    let sr_hr = r.sr_fsi_hr().unwrap();
    ensure!((sr_hr - 0.19).abs() < 5e-4, "Sr_FSI_HR = {sr_hr}");
    let uffsi = r.arm("uffsi").unwrap();
    let hr = r.arm("fsi_hr").unwrap();
    ensure!(
        uffsi.n_measurements == hr.n_measurements,
        "budgets {} vs {}",
        uffsi.n_measurements,
        hr.n_measurements
    );
    let gain = uffsi.roi_psnr - hr.roi_psnr;
    ensure!(
        gain >= ANCHOR_DB,
        "ROI-PSNR gain {gain:.2} dB < {ANCHOR_DB} dB"
    );
    Ok(format!(
        "N = {}, redundancy {:.1}%, {} measurements, Sr_FSI_HR {:.2}: ROI-PSNR {:.2} vs {:.2} dB (+{gain:.2})",
        layout.cell_count(),
        100.0 * redundancy,
        uffsi.n_measurements,
        sr_hr,
        uffsi.roi_psnr,
        hr.roi_psnr
    ))
}

fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib * 1024)
}

fn large_scale() -> Check {
    let grid = PixelGrid::new(1024, 768).unwrap();
    let rect = RectParams {
        center: (512, 384),
        m0: 155,
        n0: 110,
        alpha1: 1.085,
        alpha2: 1.08,
    };
    let layout = build_rect_layout(&rect, grid).unwrap();
    ensure!(layout.cell_count() == 86955, "N = {}", layout.cell_count());
    let chart = ChartSpec {
        roi_min: (372, 290),
        roi_max: (652, 478),
        periods: vec![2, 3, 4, 6, 8],
        digits: "1024768".into(),
    };
    let scene = make_test_chart(grid, &chart).unwrap();
    let roi = RoiMask::from_fovea(&layout).unwrap();
    let mut config = ComparisonConfig::new(Budget::Ratios {
        uffsi: 0.07,
        hr: 0.0084,
        lr: 0.07,
    });
    config.lr_cells = Some((341, 256));
    let cmp = run_comparison(&scene, &roi, &layout, &config).map_err(|e| e.to_string())?;
    let budgets: Vec<usize> = cmp.report.arms.iter().map(|a| a.n_measurements).collect();
    ensure!(budgets == [12172, 13212, 12220], "budgets {budgets:?}");
    let peak = peak_rss_bytes().ok_or("cannot read peak memory")?;
    ensure!(peak < 4 << 30, "peak memory {} MiB", peak >> 20);
    let psnr: Vec<String> = cmp
        .report
        .arms
        .iter()
        .map(|a| format!("{:.2}", a.roi_psnr))
        .collect();
    Ok(format!(
        "budgets {budgets:?}, ROI-PSNR {} dB, peak memory {} MiB",
        psnr.join(" / "),
        peak >> 20
    ))
}

fn monotone_quality() -> Check {
    let grid = PixelGrid::new(128, 128).unwrap();
    let scene = desk_chart(grid, 12);
    let rect = RectParams {
        center: (64, 64),
        m0: 20,
        n0: 20,
        alpha1: 1.3,
        alpha2: 1.3,
    };
    let layouts = [
        desk_setup().1,
        build_rect_layout(&rect, grid).unwrap(),
        build_rotrect_layout(&RotRectParams { rect, theta: 0.4 }, grid).unwrap(),
    ];
    let mut lines = Vec::new();
    for layout in &layouts {
        let name = layout.meta().name();
        let roi = RoiMask::from_fovea(layout).unwrap();
        let run = |sr: f64| -> Image {
            simulate(
                &scene.image,
                layout,
                sr,
                &PatternSpec::default(),
                &NoiseConfig::None,
            )
            .unwrap()
            .image
        };
        let reference = run(1.0);
        let errors: Vec<f64> = [0.1, 0.25, 0.5, 1.0]
            .iter()
            .map(|&sr| mse(&run(sr), &reference, &roi).unwrap())
            .collect();
        ensure!(
            errors.windows(2).all(|w| w[1] <= w[0]),
            "{name}: ROI-MSE {errors:?} increases"
        );
        lines.push(format!(
            "{name} {:.2e}>{:.2e}>{:.2e}>{:.0e}",
            errors[0], errors[1], errors[2], errors[3]
        ));
    }
    Ok(lines.join("; "))
}

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            title: "measurement-count arithmetic",
            limit: Duration::from_millis(1),
            run: measurement_counts,
        },
        Criterion {
            id: 2,
            title: "redundancy arithmetic",
            limit: Duration::from_millis(1),
            run: redundancy_arithmetic,
        },
        Criterion {
            id: 3,
            title: "weighted-pattern identity",
            limit: Duration::from_secs(10),
            run: nwd_identity,
        },
        Criterion {
            id: 4,
            title: "full-sampling oracle",
            limit: Duration::from_secs(60),
            run: full_sampling_oracle,
        },
        Criterion {
            id: 5,
            title: "degeneracy",
            limit: Duration::from_secs(10),
            run: degeneracy,
        },
        Criterion {
            id: 6,
            title: "partition and weight fuzz",
            limit: Duration::from_secs(30),
            run: partition_fuzz,
        },
        Criterion {
            id: 7,
            title: "effective sampling on the ROI",
            limit: Duration::from_secs(120),
            run: effective_sampling,
        },
        Criterion {
            id: 8,
            title: "large-scale comparison",
            limit: Duration::from_secs(600),
            run: large_scale,
        },
        Criterion {
            id: 9,
            title: "monotone quality",
            limit: Duration::from_secs(180),
            run: monotone_quality,
        },
    ];

    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| *f == c.id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(_) if elapsed > c.limit => (false, format!("took longer than {:?}", c.limit)),
            Ok(d) => (true, d),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] {} {} ({:.3?}): {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            elapsed,
            detail
        );
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} failed");
        ExitCode::FAILURE
    }
}
