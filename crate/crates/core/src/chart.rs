//! Synthetic resolution chart: line-pair panels and block digits inside a
//! box, mid-gray elsewhere.

use crate::error::{Error, Result};
use crate::grid::{Image, PixelGrid};
use crate::sensing::Scene;

const BACKGROUND: f64 = 0.5;
const DARK: f64 = 0.05;
const BRIGHT: f64 = 0.95;

/// 3×5 glyphs for the digits 0-9, one row per entry, MSB on the left.
const GLYPHS: [[u8; 5]; 10] = [
    [0b111, 0b101, 0b101, 0b101, 0b111],
    [0b010, 0b110, 0b010, 0b010, 0b111],
    [0b111, 0b001, 0b111, 0b100, 0b111],
    [0b111, 0b001, 0b111, 0b001, 0b111],
    [0b101, 0b101, 0b111, 0b001, 0b001],
    [0b111, 0b100, 0b111, 0b001, 0b111],
    [0b111, 0b100, 0b111, 0b101, 0b111],
    [0b111, 0b001, 0b010, 0b010, 0b010],
    [0b111, 0b101, 0b111, 0b101, 0b111],
    [0b111, 0b101, 0b111, 0b001, 0b111],
];

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    /// Inclusive one-based corners of the detailed region.
    pub roi_min: (usize, usize),
    pub roi_max: (usize, usize),
    /// Stripe periods in pixels, one panel each; panels alternate between
    /// vertical and horizontal stripes.
    pub periods: Vec<usize>,
    /// Digits drawn below the stripe panels.
    pub digits: String,
}

impl ChartSpec {
    /// A box of roughly a third of the frame around the center.
    pub fn centered(grid: PixelGrid) -> Self {
        let (w, h) = (grid.width(), grid.height());
        let half = (w.min(h) / 6).max(4);
        let (cx, cy) = (w / 2, h / 2);
        Self {
            roi_min: (
                cx.saturating_sub(half).max(1),
                cy.saturating_sub(half).max(1),
            ),
            roi_max: ((cx + half).min(w), (cy + half).min(h)),
            periods: vec![2, 3, 4],
            digits: "0123456789".into(),
        }
    }

    /// X range of stripe panel `i`, inclusive.
    pub fn panel_columns(&self, i: usize) -> (usize, usize) {
        let (x0, _) = self.roi_min;
        let width = self.roi_max.0 - x0 + 1;
        let n = self.periods.len();
        (x0 + i * width / n, x0 + (i + 1) * width / n - 1)
    }

    /// Last row of the stripe panels.
    pub fn stripe_bottom(&self) -> usize {
        self.roi_min.1 + (self.roi_max.1 - self.roi_min.1).div_ceil(2) - 1
    }
}

pub fn make_test_chart(grid: PixelGrid, spec: &ChartSpec) -> Result<Scene> {
    let (x0, y0) = spec.roi_min;
    let (x1, y1) = spec.roi_max;
    if x0 < 1 || y0 < 1 || x1 > grid.width() || y1 > grid.height() || x0 > x1 || y0 > y1 {
        return Err(Error::param(
            "roi",
            format!("box ({x0}, {y0})-({x1}, {y1}) does not fit the {grid} grid"),
        ));
    }
    if spec.periods.is_empty() || spec.periods.contains(&0) {
        return Err(Error::param("periods", "need at least one positive period"));
    }
    if spec.periods.len() > x1 - x0 + 1 {
        return Err(Error::param("periods", "more panels than ROI columns"));
    }
    if let Some(bad) = spec.digits.chars().find(|c| !c.is_ascii_digit()) {
        return Err(Error::param("digits", format!("cannot draw `{bad}`")));
    }

    let mut img = Image::filled(grid, BACKGROUND);
    let split = spec.stripe_bottom();
    for y in y0..=y1 {
        for x in x0..=x1 {
            img.set(x, y, DARK);
        }
    }

    for (i, &p) in spec.periods.iter().enumerate() {
        let (px0, px1) = spec.panel_columns(i);
        for y in y0..=split {
            for x in px0..=px1 {
                let t = if i % 2 == 0 { x - px0 } else { y - y0 };
                let on = t % p < p.div_ceil(2);
                img.set(x, y, if on { BRIGHT } else { DARK });
            }
        }
    }

    let digits: Vec<usize> = spec.digits.bytes().map(|b| usize::from(b - b'0')).collect();
    if !digits.is_empty() && y1 > split {
        // Each glyph cell is 4×6 units (3×5 plus spacing).
        let avail_w = x1 - x0 + 1;
        let avail_h = y1 - split;
        let scale = (avail_w / (4 * digits.len() + 1)).min(avail_h / 7);
        if scale >= 1 {
            let top = split + 1 + (avail_h - 6 * scale) / 2;
            let left = x0 + scale;
            for (d, &digit) in digits.iter().enumerate() {
                let gx = left + d * 4 * scale;
                for (row, bits) in GLYPHS[digit].iter().enumerate() {
                    for col in 0..3 {
                        if bits & (0b100 >> col) == 0 {
                            continue;
                        }
                        for yy in 0..scale {
                            for xx in 0..scale {
                                img.set(gx + col * scale + xx, top + row * scale + yy, BRIGHT);
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(Scene {
        id: format!(
            "chart {grid} roi ({x0},{y0})-({x1},{y1}) periods {:?} digits {}",
            spec.periods, spec.digits
        ),
        image: img,
    })
}
