//! Single-pixel acquisition: each pattern is projected onto the scene and
//! integrated into one detector reading.

use std::collections::HashMap;
use std::io::{BufRead, Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::binio::*;
use crate::error::{Error, Result};
use crate::fourier::{cell_phasors, Frequency, FrequencyPlan, PatternSpec, Phase, Twiddles};
use crate::geometry::{CellLayout, Lattice, WeightVector};
use crate::grid::Image;

/// A scene with a label describing where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub id: String,
    pub image: Image,
}

/// Detector noise model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum NoiseConfig {
    #[default]
    None,
    /// Zero-mean additive Gaussian noise on every reading. `sigma` is
    /// relative to the mean noiseless reading (the pattern DC level times the
    /// summed cell means). Draws are keyed by `(seed, frequency, phase)`.
    Gaussian { sigma: f64, seed: u64 },
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseConfig::Gaussian { sigma, .. } if !(sigma.is_finite() && sigma >= 0.0) => Err(
                Error::param("noise sigma", format!("must be >= 0, got {sigma}")),
            ),
            _ => Ok(()),
        }
    }
}

/// One reading `S_φ(f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reading {
    pub freq: Frequency,
    pub phase: Phase,
    pub value: f64,
}

/// Four phase readings for each planned frequency, in plan order.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    lattice: Lattice,
    freqs: Vec<Frequency>,
    readings: Vec<[f64; 4]>,
    noise: NoiseConfig,
}

impl MeasurementSet {
    pub fn new(lattice: Lattice, freqs: Vec<Frequency>, readings: Vec<[f64; 4]>) -> Result<Self> {
        if freqs.len() != readings.len() {
            return Err(Error::IncompleteMeasurements(format!(
                "{} frequencies but {} reading groups",
                freqs.len(),
                readings.len()
            )));
        }
        Ok(Self {
            lattice,
            freqs,
            readings,
            noise: NoiseConfig::None,
        })
    }

    /// Groups loose readings by frequency, in order of first appearance.
    /// Every frequency needs all four phases exactly once.
    pub fn from_readings(lattice: Lattice, readings: &[Reading]) -> Result<Self> {
        let mut order = Vec::new();
        let mut slots: HashMap<Frequency, [Option<f64>; 4]> = HashMap::new();
        for r in readings {
            let slot = slots.entry(r.freq).or_insert_with(|| {
                order.push(r.freq);
                [None; 4]
            });
            if slot[r.phase.index()].replace(r.value).is_some() {
                return Err(Error::IncompleteMeasurements(format!(
                    "duplicate reading for ({}, {}) at {} degrees",
                    r.freq.ku,
                    r.freq.kv,
                    r.phase.degrees()
                )));
            }
        }
        let mut grouped = Vec::with_capacity(order.len());
        for f in &order {
            let slot = slots[f];
            let mut values = [0.0; 4];
            for (i, v) in slot.iter().enumerate() {
                values[i] = v.ok_or_else(|| {
                    Error::IncompleteMeasurements(format!(
                        "frequency ({}, {}) lacks the {} degree reading",
                        f.ku,
                        f.kv,
                        90 * i
                    ))
                })?;
            }
            grouped.push(values);
        }
        Self::new(lattice, order, grouped)
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn frequencies(&self) -> &[Frequency] {
        &self.freqs
    }

    /// Readings indexed by [`Phase::index`].
    pub fn readings(&self) -> &[[f64; 4]] {
        &self.readings
    }

    pub fn noise(&self) -> NoiseConfig {
        self.noise
    }

    pub fn len(&self) -> usize {
        4 * self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Reading> + '_ {
        self.freqs
            .iter()
            .zip(&self.readings)
            .flat_map(|(&freq, s)| {
                Phase::ALL.into_iter().map(move |phase| Reading {
                    freq,
                    phase,
                    value: s[phase.index()],
                })
            })
    }
}

/// Inner product of scene and pattern over all pixels, in raster order.
pub fn measure(scene: &Image, pattern: &Image) -> Result<f64> {
    scene.check_grid(pattern.grid())?;
    Ok(dot(scene.as_slice(), pattern.as_slice()))
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Projects every planned pattern at all four phases and records the
/// detector readings.
///
/// Frequencies are processed in parallel, each into its own slot; every
/// reading is a sequential sum, so results do not depend on the schedule.
pub fn run_acquisition(
    scene: &Image,
    layout: &CellLayout,
    weights: &WeightVector,
    plan: &FrequencyPlan,
    spec: &PatternSpec,
    noise: &NoiseConfig,
) -> Result<MeasurementSet> {
    scene.check_grid(layout.grid())?;
    weights.check_layout(layout)?;
    spec.validate()?;
    noise.validate()?;
    if plan.lattice() != layout.lattice() {
        return Err(Error::dims(
            format!("plan for {:?}", layout.lattice()),
            format!("{:?}", plan.lattice()),
        ));
    }

    let twiddles = Twiddles::new(layout.lattice());
    let w = weights.values();
    let p2c = layout.pixel_to_cell();
    let o = scene.as_slice();
    let mut readings: Vec<[f64; 4]> = plan
        .frequencies()
        .par_iter()
        .map_init(
            || (vec![0.0; w.len()], vec![0.0; p2c.len()]),
            |(cells, pattern), &f| {
                let z = cell_phasors(&twiddles, f);
                let mut out = [0.0; 4];
                for phase in Phase::ALL {
                    for ((c, &zn), &wn) in cells.iter_mut().zip(&z).zip(w) {
                        *c = wn * (spec.a + spec.b * phase.shifted_cos(zn));
                    }
                    for (p, &n) in pattern.iter_mut().zip(p2c) {
                        *p = cells[n as usize];
                    }
                    out[phase.index()] = dot(pattern, o);
                }
                out
            },
        )
        .collect();

    if let NoiseConfig::Gaussian { sigma, seed } = *noise {
        if sigma > 0.0 && !readings.is_empty() {
            let level = readings.iter().flatten().sum::<f64>() / (4 * readings.len()) as f64;
            let scale = sigma * level.abs();
            readings.par_iter_mut().enumerate().for_each(|(i, s)| {
                for (j, v) in s.iter_mut().enumerate() {
                    *v += scale * noise_draw(seed, i, j);
                }
            });
        }
    }

    Ok(MeasurementSet {
        lattice: layout.lattice(),
        freqs: plan.frequencies().to_vec(),
        readings,
        noise: *noise,
    })
}

/// Standard normal draw for reading `(freq_index, phase)`, independent of
/// evaluation order.
fn noise_draw(seed: u64, freq_index: usize, phase: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((freq_index as u64) << 2) | phase as u64);
    StandardNormal.sample(&mut rng)
}

fn lattice_tag(lattice: Lattice) -> String {
    match lattice {
        Lattice::Line { len } => format!("line:{len}"),
        Lattice::Plane { width, height } => format!("plane:{width}x{height}"),
    }
}

fn parse_lattice_tag(tag: &str) -> Option<Lattice> {
    if let Some(len) = tag.strip_prefix("line:") {
        return len.parse().ok().map(|len| Lattice::Line { len });
    }
    let (w, h) = tag.strip_prefix("plane:")?.split_once('x')?;
    Some(Lattice::Plane {
        width: w.parse().ok()?,
        height: h.parse().ok()?,
    })
}

fn noise_tag(noise: NoiseConfig) -> String {
    match noise {
        NoiseConfig::None => "none".into(),
        NoiseConfig::Gaussian { sigma, seed } => format!("gaussian:{sigma}:{seed}"),
    }
}

fn parse_noise_tag(tag: &str) -> Option<NoiseConfig> {
    if tag == "none" {
        return Some(NoiseConfig::None);
    }
    let mut parts = tag.strip_prefix("gaussian:")?.split(':');
    let sigma = parts.next()?.parse().ok()?;
    let seed = parts.next()?.parse().ok()?;
    Some(NoiseConfig::Gaussian { sigma, seed })
}

/// Writes the set as CSV.
///
/// A leading `#` line records the lattice and noise model. Columns are
/// `k,phase,reading` on line lattices and `k_u,k_v,phase,reading` on plane
/// lattices; `phase` is in degrees and readings use the shortest decimal
/// form that parses back to the same `f64`.
pub fn write_measurements_csv<W: Write>(set: &MeasurementSet, mut w: W) -> Result<()> {
    writeln!(
        w,
        "# lattice={} noise={}",
        lattice_tag(set.lattice),
        noise_tag(set.noise)
    )?;
    let plane = matches!(set.lattice, Lattice::Plane { .. });
    writeln!(
        w,
        "{}",
        if plane {
            "k_u,k_v,phase,reading"
        } else {
            "k,phase,reading"
        }
    )?;
    for r in set.iter() {
        if plane {
            writeln!(
                w,
                "{},{},{},{}",
                r.freq.ku,
                r.freq.kv,
                r.phase.degrees(),
                r.value
            )?;
        } else {
            writeln!(w, "{},{},{}", r.freq.ku, r.phase.degrees(), r.value)?;
        }
    }
    Ok(())
}

pub fn read_measurements_csv<R: BufRead>(r: R) -> Result<MeasurementSet> {
    const WHAT: &str = "measurement CSV";
    let mut lines = r.lines();
    let meta = lines
        .next()
        .ok_or_else(|| Error::format(WHAT, "empty file"))??;
    let mut lattice = None;
    let mut noise = None;
    for field in meta.trim_start_matches('#').split_whitespace() {
        match field.split_once('=') {
            Some(("lattice", v)) => lattice = parse_lattice_tag(v),
            Some(("noise", v)) => noise = parse_noise_tag(v),
            _ => {}
        }
    }
    let lattice = lattice.ok_or_else(|| Error::format(WHAT, "missing lattice tag"))?;
    let noise = noise.ok_or_else(|| Error::format(WHAT, "missing noise tag"))?;
    let plane = matches!(lattice, Lattice::Plane { .. });
    let header = lines
        .next()
        .ok_or_else(|| Error::format(WHAT, "missing header"))??;
    let expected = if plane {
        "k_u,k_v,phase,reading"
    } else {
        "k,phase,reading"
    };
    if header.trim() != expected {
        return Err(Error::format(WHAT, format!("expected header `{expected}`")));
    }

    let mut readings = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::format(WHAT, format!("line {}: `{line}`", i + 3));
        let cols: Vec<&str> = line.trim().split(',').collect();
        let (ku, kv, phase, value) = match (plane, cols.as_slice()) {
            (true, [ku, kv, p, v]) => (*ku, *kv, *p, *v),
            (false, [k, p, v]) => (*k, "0", *p, *v),
            _ => return Err(bad()),
        };
        let phase: u32 = phase.parse().map_err(|_| bad())?;
        readings.push(Reading {
            freq: Frequency::new(
                ku.parse().map_err(|_| bad())?,
                kv.parse().map_err(|_| bad())?,
            ),
            phase: Phase::from_index((phase / 90) as usize)
                .filter(|_| phase.is_multiple_of(90))
                .ok_or_else(bad)?,
            value: value.parse().map_err(|_| bad())?,
        });
    }
    let mut set = MeasurementSet::from_readings(lattice, &readings)?;
    set.noise = noise;
    Ok(set)
}

const MAGIC: &[u8; 4] = b"UFSM";
const VERSION: u32 = 1;

/// Binary twin of the CSV:
///
/// ```text
/// magic "UFSM", version u32 = 1
/// lattice kind u32 (1 line, 2 plane), dim_u u32, dim_v u32
/// noise kind u32 (0 none, 1 gaussian), sigma f64, seed u64 as i64 bits
/// count u32
/// count × { k_u i64, k_v i64, reading f64 × 4 (0, 90, 180, 270 degrees) }
/// ```
pub fn write_measurements_bin<W: Write>(set: &MeasurementSet, mut w: W) -> Result<()> {
    write_header(&mut w, MAGIC, VERSION)?;
    let (du, dv) = set.lattice.dims();
    put_u32(
        &mut w,
        if matches!(set.lattice, Lattice::Line { .. }) {
            1
        } else {
            2
        },
    )?;
    put_u32(&mut w, du as u32)?;
    put_u32(&mut w, dv as u32)?;
    let (kind, sigma, seed) = match set.noise {
        NoiseConfig::None => (0, 0.0, 0),
        NoiseConfig::Gaussian { sigma, seed } => (1, sigma, seed),
    };
    put_u32(&mut w, kind)?;
    put_f64(&mut w, sigma)?;
    put_i64(&mut w, seed as i64)?;
    put_u32(&mut w, set.freqs.len() as u32)?;
    for (f, s) in set.freqs.iter().zip(&set.readings) {
        put_i64(&mut w, f.ku)?;
        put_i64(&mut w, f.kv)?;
        for &v in s {
            put_f64(&mut w, v)?;
        }
    }
    Ok(())
}

pub fn read_measurements_bin<R: Read>(mut r: R) -> Result<MeasurementSet> {
    const WHAT: &str = "measurement file";
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
    let noise_kind = get_u32(&mut r)?;
    let sigma = get_f64(&mut r)?;
    let seed = get_i64(&mut r)? as u64;
    let noise = match noise_kind {
        0 => NoiseConfig::None,
        1 => NoiseConfig::Gaussian { sigma, seed },
        _ => return Err(Error::format(WHAT, "bad noise descriptor")),
    };
    let count = get_u32(&mut r)? as usize;
    let mut freqs = Vec::with_capacity(count.min(1 << 20));
    let mut readings = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        freqs.push(Frequency::new(get_i64(&mut r)?, get_i64(&mut r)?));
        let mut s = [0.0; 4];
        for v in &mut s {
            *v = get_f64(&mut r)?;
        }
        readings.push(s);
    }
    expect_end(&mut r, WHAT)?;
    let mut set = MeasurementSet::new(lattice, freqs, readings)?;
    set.noise = noise;
    Ok(set)
}
