//! Netpbm graymap reading and writing.
//!
//! Binary (`P5`) and plain (`P2`) graymaps are read at 8 or 16 bits;
//! everything is written as binary `P5`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::grid::{Image, PixelGrid};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graymap {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

impl Graymap {
    /// Converts to `[0, 1]` by dividing by `maxval`.
    pub fn to_image(&self) -> Result<Image> {
        let grid = PixelGrid::new(self.width, self.height)?;
        let scale = f64::from(self.maxval);
        Image::from_vec(
            grid,
            self.samples.iter().map(|&s| f64::from(s) / scale).collect(),
        )
    }

    /// Quantizes values in `[lo, hi]` to 8 bits; values outside are clamped.
    pub fn from_image_range(img: &Image, lo: f64, hi: f64) -> Self {
        let span = if hi > lo { hi - lo } else { 1.0 };
        let samples = img
            .as_slice()
            .iter()
            .map(|&v| (((v - lo) / span).clamp(0.0, 1.0) * 255.0).round() as u16)
            .collect();
        Self {
            width: img.width(),
            height: img.height(),
            maxval: 255,
            samples,
        }
    }

    /// Min-max normalized 8-bit rendering, for display only.
    pub fn from_image_normalized(img: &Image) -> Self {
        let (lo, hi) = img.min_max();
        Self::from_image_range(img, lo, hi)
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "P5\n{} {}\n{}\n", self.width, self.height, self.maxval)?;
        if self.maxval < 256 {
            let bytes: Vec<u8> = self.samples.iter().map(|&s| s as u8).collect();
            w.write_all(&bytes)?;
        } else {
            let mut bytes = Vec::with_capacity(self.samples.len() * 2);
            for s in &self.samples {
                bytes.extend_from_slice(&s.to_be_bytes());
            }
            w.write_all(&bytes)?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 2];
        r.read_exact(&mut magic)?;
        let plain = match &magic {
            b"P5" => false,
            b"P2" => true,
            _ => return Err(Error::format("PGM", "missing P5/P2 magic")),
        };
        let width = header_field(&mut r)?;
        let height = header_field(&mut r)?;
        let maxval = header_field(&mut r)?;
        if width == 0 || height == 0 || !(1..=65535).contains(&maxval) {
            return Err(Error::format(
                "PGM",
                format!("bad header {width}x{height} maxval {maxval}"),
            ));
        }
        let count = width * height;
        let samples: Vec<u16> = if plain {
            (0..count)
                .map(|_| header_field(&mut r).map(|v| v as u16))
                .collect::<Result<_>>()?
        } else if maxval < 256 {
            let mut buf = vec![0u8; count];
            r.read_exact(&mut buf)?;
            buf.into_iter().map(u16::from).collect()
        } else {
            let mut buf = vec![0u8; count * 2];
            r.read_exact(&mut buf)?;
            buf.chunks_exact(2)
                .map(|b| u16::from_be_bytes([b[0], b[1]]))
                .collect()
        };
        if samples.iter().any(|&s| usize::from(s) > maxval) {
            return Err(Error::format("PGM", "sample exceeds maxval"));
        }
        Ok(Self {
            width,
            height,
            maxval: maxval as u16,
            samples,
        })
    }
}

/// Next whitespace-delimited decimal field, skipping `#` comments. Consumes
/// exactly one trailing whitespace byte, as the raster follows directly.
fn header_field<R: BufRead>(r: &mut R) -> Result<usize> {
    let mut byte = [0u8; 1];
    let mut digits = String::new();
    loop {
        if r.read(&mut byte)? == 0 {
            break;
        }
        match byte[0] {
            b'#' if digits.is_empty() => {
                let mut skip = Vec::new();
                r.read_until(b'\n', &mut skip)?;
            }
            b if b.is_ascii_whitespace() => {
                if !digits.is_empty() {
                    break;
                }
            }
            b if b.is_ascii_digit() => digits.push(b as char),
            other => {
                return Err(Error::format(
                    "PGM",
                    format!("unexpected byte {other:#04x} in header"),
                ))
            }
        }
    }
    digits
        .parse()
        .map_err(|_| Error::format("PGM", "truncated header"))
}
