//! Display smoothing of the non-ROI area.

use crate::error::{Error, Result};
use crate::geometry::CellLayout;
use crate::grid::Image;

fn kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect()
}

/// One separable pass; taps falling outside the grid are dropped and the
/// remaining weights renormalized.
fn blur_axis(src: &[f64], w: usize, h: usize, k: &[f64], horizontal: bool) -> Vec<f64> {
    let r = (k.len() / 2) as isize;
    let mut out = vec![0.0; src.len()];
    for y in 0..h {
        for x in 0..w {
            let (mut acc, mut norm) = (0.0, 0.0);
            for (t, &kt) in k.iter().enumerate() {
                let off = t as isize - r;
                let (sx, sy) = if horizontal {
                    (x as isize + off, y as isize)
                } else {
                    (x as isize, y as isize + off)
                };
                if sx < 0 || sy < 0 || sx >= w as isize || sy >= h as isize {
                    continue;
                }
                acc += kt * src[sy as usize * w + sx as usize];
                norm += kt;
            }
            out[y * w + x] = acc / norm;
        }
    }
    out
}

/// Gaussian blur (truncated at 3σ) applied to periphery pixels only; fovea
/// pixels are copied unchanged.
pub fn smooth_nroi(img: &Image, layout: &CellLayout, sigma: f64) -> Result<Image> {
    img.check_grid(layout.grid())?;
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param("sigma", format!("must be > 0, got {sigma}")));
    }
    let (w, h) = (img.width(), img.height());
    let k = kernel(sigma);
    let blurred = blur_axis(&blur_axis(img.as_slice(), w, h, &k, true), w, h, &k, false);
    let data = blurred
        .into_iter()
        .zip(img.as_slice())
        .enumerate()
        .map(|(m, (b, &orig))| if layout.is_fovea_pixel(m) { orig } else { b })
        .collect();
    Image::from_vec(img.grid(), data)
}
