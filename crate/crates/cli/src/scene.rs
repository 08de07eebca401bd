//! Scene input: 8/16-bit PGM or PNG, scaled to `[0, 1]` by the largest
//! representable sample.

use std::path::Path;

use image::DynamicImage;
use uffsi_core::{Graymap, Image, PixelGrid, Scene};

use crate::error::CliError;

pub fn load_scene(path: &Path, grid: PixelGrid) -> Result<(Scene, Vec<String>), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Io(format!("cannot read scene {}: {e}", path.display())))?;
    let mut warnings = Vec::new();
    let image = if bytes.starts_with(b"P5") || bytes.starts_with(b"P2") {
        Graymap::read(bytes.as_slice())
            .and_then(|g| g.to_image())
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
    } else {
        let decoded = image::load_from_memory(&bytes)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        decode(decoded, &mut warnings)?
    };
    let image = fit(image, grid, &mut warnings)?;
    let id = format!("{}", path.display());
    Ok((Scene { id, image }, warnings))
}

fn decode(img: DynamicImage, warnings: &mut Vec<String>) -> Result<Image, CliError> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let grid = PixelGrid::new(w, h)?;
    let data: Vec<f64> = match img {
        DynamicImage::ImageLuma8(buf) => buf
            .into_raw()
            .iter()
            .map(|&v| f64::from(v) / 255.0)
            .collect(),
        DynamicImage::ImageLuma16(buf) => buf
            .into_raw()
            .iter()
            .map(|&v| f64::from(v) / 65535.0)
            .collect(),
        DynamicImage::ImageLumaA8(_) | DynamicImage::ImageLumaA16(_) => {
            warnings.push("alpha channel ignored".into());
            img.to_luma16()
                .into_raw()
                .iter()
                .map(|&v| f64::from(v) / 65535.0)
                .collect()
        }
        other => {
            warnings.push("color image converted to luma".into());
            other
                .to_luma16()
                .into_raw()
                .iter()
                .map(|&v| f64::from(v) / 65535.0)
                .collect()
        }
    };
    Ok(Image::from_vec(grid, data)?)
}

/// Center-crops a larger image to `grid`; smaller images are rejected.
fn fit(img: Image, grid: PixelGrid, warnings: &mut Vec<String>) -> Result<Image, CliError> {
    let src = img.grid();
    if src == grid {
        return Ok(img);
    }
    if src.width() < grid.width() || src.height() < grid.height() {
        return Err(CliError::Config(format!(
            "scene is {src}, smaller than the configured {grid} grid"
        )));
    }
    let x0 = (src.width() - grid.width()) / 2;
    let y0 = (src.height() - grid.height()) / 2;
    warnings.push(format!(
        "scene is {src}; center-cropped to {grid} at offset ({x0}, {y0})"
    ));
    Ok(Image::from_fn(grid, |x, y| img.get(x + x0, y + y0)))
}
