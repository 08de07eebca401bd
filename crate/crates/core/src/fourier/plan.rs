use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::{CellLayout, Lattice};

/// A lattice frequency in signed form, `k ∈ (-n/2, n/2]` per axis.
/// Line lattices use `kv = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frequency {
    pub ku: i64,
    pub kv: i64,
}

impl Frequency {
    pub const DC: Frequency = Frequency { ku: 0, kv: 0 };

    pub fn new(ku: i64, kv: i64) -> Self {
        Self { ku, kv }
    }

    /// Wrapped, non-negative indices on the lattice.
    pub fn wrapped(&self, lattice: Lattice) -> (usize, usize) {
        let (nu, nv) = lattice.dims();
        (
            self.ku.rem_euclid(nu as i64) as usize,
            self.kv.rem_euclid(nv as i64) as usize,
        )
    }

    /// Flat index of this frequency in a lattice-shaped coefficient array.
    pub fn index(&self, lattice: Lattice) -> usize {
        let (u, v) = self.wrapped(lattice);
        v * lattice.dims().0 + u
    }

    /// The conjugate partner `-k`, in signed form.
    pub fn negated(&self, lattice: Lattice) -> Self {
        let (nu, nv) = lattice.dims();
        let (u, v) = self.wrapped(lattice);
        Self {
            ku: signed((nu - u) % nu, nu),
            kv: signed((nv - v) % nv, nv),
        }
    }

    pub fn is_self_conjugate(&self, lattice: Lattice) -> bool {
        self.negated(lattice) == *self
    }

    /// Euclidean norm of `(ku / U, kv / V)` in cycles per lattice step.
    pub fn magnitude(&self, lattice: Lattice) -> f64 {
        let (nu, nv) = lattice.dims();
        let fu = self.ku as f64 / nu as f64;
        let fv = self.kv as f64 / nv as f64;
        (fu * fu + fv * fv).sqrt()
    }

    /// `|f|²` scaled by `U² V²`, exact in integers.
    fn scaled_norm(&self, lattice: Lattice) -> u128 {
        let (nu, nv) = lattice.dims();
        let (ku, kv) = (
            self.ku.unsigned_abs() as u128,
            self.kv.unsigned_abs() as u128,
        );
        ku * ku * (nv as u128).pow(2) + kv * kv * (nu as u128).pow(2)
    }
}

#[inline]
fn signed(k: usize, n: usize) -> i64 {
    if 2 * k > n {
        k as i64 - n as i64
    } else {
        k as i64
    }
}

/// Number of conjugate-pair representatives of a lattice: the frequencies
/// needed for full sampling of a real signal.
pub fn representative_count(lattice: Lattice) -> usize {
    let (nu, nv) = lattice.dims();
    let self_conj = (1 + usize::from(nu % 2 == 0)) * (1 + usize::from(nv % 2 == 0));
    (nu * nv + self_conj) / 2
}

/// Frequencies sampled at ratio `sr`: `floor(sr · N / 2)`, at least one.
/// Full sampling (`sr = 1`) takes every representative, including the
/// self-conjugate ones beyond `N / 2`.
pub fn frequency_count(lattice: Lattice, sr: f64) -> Result<usize> {
    if !(sr.is_finite() && sr > 0.0 && sr <= 1.0) {
        return Err(Error::param(
            "sampling ratio",
            format!("must lie in (0, 1], got {sr}"),
        ));
    }
    let reps = representative_count(lattice);
    if sr == 1.0 {
        return Ok(reps);
    }
    let budget = (sr * lattice.len() as f64 / 2.0).floor() as usize;
    Ok(budget.clamp(1, reps))
}

/// Ordered subset of lattice frequencies to measure.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyPlan {
    lattice: Lattice,
    ratio: f64,
    freqs: Vec<Frequency>,
}

impl FrequencyPlan {
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn frequencies(&self) -> &[Frequency] {
        &self.freqs
    }

    pub fn n_freq(&self) -> usize {
        self.freqs.len()
    }

    /// Four phase-shifted readings per frequency.
    pub fn n_measurements(&self) -> usize {
        4 * self.freqs.len()
    }

    /// Whether every conjugate pair of the lattice is covered.
    pub fn is_full(&self) -> bool {
        self.freqs.len() == representative_count(self.lattice)
    }
}

fn order(lattice: Lattice) -> impl Fn(&Frequency, &Frequency) -> Ordering {
    move |a, b| {
        a.scaled_norm(lattice)
            .cmp(&b.scaled_norm(lattice))
            .then(a.ku.cmp(&b.ku))
            .then(a.kv.cmp(&b.kv))
    }
}

/// Low-frequency-first plan on a bare lattice.
///
/// One representative is kept per conjugate pair: of `k` and `-k`, the one
/// with the lexicographically larger signed `(ku, kv)`. Representatives are
/// ordered by `|f|`, ties by smaller `ku`, then smaller `kv`; DC comes first.
pub fn plan_for_lattice(lattice: Lattice, sr: f64) -> Result<FrequencyPlan> {
    let count = frequency_count(lattice, sr)?;
    Ok(build_plan(lattice, count, sr))
}

/// Plan with exactly `count` frequencies, for callers that fix the
/// measurement budget instead of the ratio. The recorded ratio is the
/// midpoint value whose `floor(sr · N / 2)` gives back `count`.
pub fn plan_with_count(lattice: Lattice, count: usize) -> Result<FrequencyPlan> {
    let reps = representative_count(lattice);
    if !(1..=reps).contains(&count) {
        return Err(Error::param(
            "frequency count",
            format!("must lie in 1..={reps}, got {count}"),
        ));
    }
    let sr = if count == reps {
        1.0
    } else {
        ((count as f64 + 0.5) * 2.0 / lattice.len() as f64).min(1.0)
    };
    Ok(build_plan(lattice, count, sr))
}

fn build_plan(lattice: Lattice, count: usize, sr: f64) -> FrequencyPlan {
    let (nu, nv) = lattice.dims();
    let mut reps = Vec::with_capacity(representative_count(lattice));
    for v in 0..nv {
        for u in 0..nu {
            let f = Frequency::new(signed(u, nu), signed(v, nv));
            let neg = f.negated(lattice);
            if (f.ku, f.kv) >= (neg.ku, neg.kv) {
                reps.push(f);
            }
        }
    }
    let cmp = order(lattice);
    if count < reps.len() {
        reps.select_nth_unstable_by(count, &cmp);
        reps.truncate(count);
    }
    reps.sort_unstable_by(&cmp);
    FrequencyPlan {
        lattice,
        ratio: sr,
        freqs: reps,
    }
}

pub fn make_frequency_plan(layout: &CellLayout, sr: f64) -> Result<FrequencyPlan> {
    plan_for_lattice(layout.lattice(), sr)
}
