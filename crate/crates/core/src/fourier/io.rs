//! Exports: frequency plans as CSV, spectra as binary dumps, patterns as PGM.

use std::io::{Read, Write};

use rustfft::num_complex::Complex64;

use super::{Frequency, FrequencyPlan, Phase, Spectrum};
use crate::binio::*;
use crate::error::{Error, Result};
use crate::geometry::Lattice;
use crate::grid::Image;
use crate::pgm::Graymap;

/// `index,k,abs_f` on line lattices, `index,k_u,k_v,abs_f` on plane
/// lattices; `abs_f` is in cycles per lattice step.
pub fn write_plan_csv<W: Write>(plan: &FrequencyPlan, mut w: W) -> Result<()> {
    let lattice = plan.lattice();
    let plane = matches!(lattice, Lattice::Plane { .. });
    writeln!(
        w,
        "{}",
        if plane {
            "index,k_u,k_v,abs_f"
        } else {
            "index,k,abs_f"
        }
    )?;
    for (i, f) in plan.frequencies().iter().enumerate() {
        let mag = f.magnitude(lattice);
        if plane {
            writeln!(w, "{i},{},{},{mag}", f.ku, f.kv)?;
        } else {
            writeln!(w, "{i},{},{mag}", f.ku)?;
        }
    }
    Ok(())
}

/// File name encoding frequency and phase, e.g. `pattern_u3_v-2_p090.pgm`.
pub fn pattern_file_name(freq: Frequency, phase: Phase) -> String {
    format!(
        "pattern_u{}_v{}_p{:03}.pgm",
        freq.ku,
        freq.kv,
        phase.degrees()
    )
}

/// 8-bit rendering of a pattern image on the fixed `[0, 1]` scale.
pub fn pattern_graymap(pattern: &Image) -> Graymap {
    Graymap::from_image_range(pattern, 0.0, 1.0)
}

const MAGIC: &[u8; 4] = b"UFSS";
const VERSION: u32 = 1;

/// ```text
/// magic "UFSS", version u32 = 1
/// lattice kind u32 (1 line, 2 plane), dim_u u32, dim_v u32
/// coefficients [f64 re, f64 im; dim_u * dim_v], row-major
/// measured mask [u8; dim_u * dim_v]
/// ```
pub fn write_spectrum<W: Write>(spectrum: &Spectrum, mut w: W) -> Result<()> {
    let lattice = spectrum.lattice();
    let (du, dv) = lattice.dims();
    write_header(&mut w, MAGIC, VERSION)?;
    put_u32(
        &mut w,
        if matches!(lattice, Lattice::Line { .. }) {
            1
        } else {
            2
        },
    )?;
    put_u32(&mut w, du as u32)?;
    put_u32(&mut w, dv as u32)?;
    let mut buf = Vec::with_capacity(lattice.len() * 17);
    for c in spectrum.coeffs() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    buf.extend(spectrum.measured_mask().iter().map(|&m| u8::from(m)));
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_spectrum<R: Read>(mut r: R) -> Result<Spectrum> {
    const WHAT: &str = "spectrum dump";
    read_header(&mut r, WHAT, MAGIC, VERSION)?;
    let kind = get_u32(&mut r)?;
    let du = get_u32(&mut r)? as usize;
    let dv = get_u32(&mut r)? as usize;
    let lattice = match kind {
        1 if dv == 1 => Lattice::Line { len: du },
        2 => Lattice::Plane {
            width: du,
            height: dv,
        },
        _ => return Err(Error::format(WHAT, "bad lattice descriptor")),
    };
    let coeffs = (0..lattice.len())
        .map(|_| Ok(Complex64::new(get_f64(&mut r)?, get_f64(&mut r)?)))
        .collect::<Result<Vec<_>>>()?;
    let mask = (0..lattice.len())
        .map(|_| get_u8(&mut r).map(|b| b != 0))
        .collect::<Result<Vec<_>>>()?;
    expect_end(&mut r, WHAT)?;
    Spectrum::new(lattice, coeffs, mask)
}
