//! Erasure probabilities of the synthetic channels, with and without decoder faults.
//!
//! Levels are counted from the leaves: level 0 holds the raw channel copies and
//! level `n` the fully polarized channels. A faulty decoder erases each message
//! written at levels `1..=n` with probability `delta`; with `n_p` protected levels
//! the top `n_p` levels (nearest the root) are fault-free.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{fmt_f64, CSV_HEADER};

macro_rules! probability_newtype {
    ($(#[$meta:meta])* $name:ident, $what:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
        #[serde(try_from = "f64", into = "f64")]
        pub struct $name(f64);

        impl $name {
            pub const ZERO: Self = Self(0.0);
            pub const ONE: Self = Self(1.0);

            pub fn new(value: f64) -> Result<Self> {
                if (0.0..=1.0).contains(&value) {
                    Ok(Self(value))
                } else {
                    Err(Error::Domain { what: $what, value })
                }
            }

            #[inline]
            pub fn get(self) -> f64 {
                self.0
            }
        }

        impl TryFrom<f64> for $name {
            type Error = Error;
            fn try_from(value: f64) -> Result<Self> {
                Self::new(value)
            }
        }

        impl From<$name> for f64 {
            fn from(p: $name) -> f64 {
                p.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }
    };
}

probability_newtype!(
    /// Erasure probability of a (synthetic) binary erasure channel.
    ErasureProb,
    "erasure probability"
);
probability_newtype!(
    /// Probability that the decoder erases a message when writing it to memory.
    FaultProb,
    "fault probability"
);

// Raw kernels. Callers guarantee inputs in [0, 1]. The fault-free forms are
// written so that the faulty forms at delta = 0 reproduce them bit for bit.

#[inline]
pub(crate) fn minus_raw(eps: f64) -> f64 {
    2.0 * eps - eps * eps
}

#[inline]
pub(crate) fn plus_raw(eps: f64) -> f64 {
    eps * eps
}

#[inline]
pub(crate) fn minus_faulty_raw(eps: f64, delta: f64) -> f64 {
    minus_raw(eps) * (1.0 - delta) + delta
}

#[inline]
pub(crate) fn plus_faulty_raw(eps: f64, delta: f64) -> f64 {
    plus_raw(eps) * (1.0 - delta) + delta
}

/// Erasure probability of the "−" (worse) channel: `2ε − ε²`.
pub fn t_minus(eps: ErasureProb) -> ErasureProb {
    ErasureProb(minus_raw(eps.0))
}

/// Erasure probability of the "+" (better) channel: `ε²`.
pub fn t_plus(eps: ErasureProb) -> ErasureProb {
    ErasureProb(plus_raw(eps.0))
}

/// `T⁻` followed by a faulty memory write.
pub fn t_minus_faulty(eps: ErasureProb, delta: FaultProb) -> ErasureProb {
    ErasureProb(minus_faulty_raw(eps.0, delta.0))
}

/// `T⁺` followed by a faulty memory write.
pub fn t_plus_faulty(eps: ErasureProb, delta: FaultProb) -> ErasureProb {
    ErasureProb(plus_faulty_raw(eps.0, delta.0))
}

/// One polarization branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    #[inline]
    pub fn bit(self) -> usize {
        match self {
            Sign::Minus => 0,
            Sign::Plus => 1,
        }
    }

    #[inline]
    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 1 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Sequence of branches from the leaves to a synthetic channel.
///
/// The first sign is the transform applied at level 1. Reading `−` as 0 and `+`
/// as 1 gives the channel index with the first sign as most significant bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SignString(Vec<Sign>);

impl SignString {
    pub fn new(signs: Vec<Sign>) -> Self {
        Self(signs)
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn level(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, s| (acc << 1) | s.bit())
    }

    pub fn from_index(index: usize, level: u32) -> Result<Self> {
        let bound = checked_pow2(level)?;
        if index >= bound {
            return Err(Error::IndexOutOfRange {
                index,
                level,
                bound,
            });
        }
        let signs = (0..level)
            .rev()
            .map(|shift| Sign::from_bit(index >> shift))
            .collect();
        Ok(Self(signs))
    }
}

impl fmt::Display for SignString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Sign::Minus => "-",
                Sign::Plus => "+",
            })?;
        }
        Ok(())
    }
}

impl FromStr for SignString {
    type Err = Error;

    /// Accepts `+`, `-` and the Unicode minus sign `−`.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' | '\u{2212}' => Ok(Sign::Minus),
                other => Err(Error::invalid(format!("invalid sign character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignString)
    }
}

pub fn sign_string_to_index(s: &SignString) -> usize {
    s.to_index()
}

pub fn index_to_sign_string(index: usize, level: u32) -> Result<SignString> {
    SignString::from_index(index, level)
}

/// Largest supported tree depth. Tables are dense, so anything beyond this is
/// unreasonable anyway.
pub const MAX_LEVEL: u32 = 30;

pub(crate) fn checked_pow2(level: u32) -> Result<usize> {
    if level > MAX_LEVEL {
        return Err(Error::invalid(format!(
            "level {level} exceeds the supported maximum {MAX_LEVEL}"
        )));
    }
    Ok(1usize << level)
}

/// Number of transform steps, counted from the leaves, that see decoder faults.
pub fn unprotected_levels(n: u32, protected_levels: u32) -> u32 {
    n - protected_levels.min(n)
}

/// Fault probability in effect for writes at `level` (1-based).
#[inline]
pub(crate) fn level_delta(level: u32, n_unprotected: u32, delta: f64) -> f64 {
    if level <= n_unprotected {
        delta
    } else {
        0.0
    }
}

/// Erasure probabilities of all `2^level` channel types at one tree level.
#[derive(Debug, Clone, PartialEq)]
pub struct ZTable {
    level: u32,
    values: Vec<f64>,
}

impl ZTable {
    /// The single level-0 entry: the channel itself.
    pub fn root(p: ErasureProb) -> Self {
        Self {
            level: 0,
            values: vec![p.get()],
        }
    }

    /// Builds a table from raw values; the length must be a power of two.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let len = values.len();
        if !len.is_power_of_two() {
            return Err(Error::invalid(format!(
                "table length {len} is not a power of two"
            )));
        }
        if let Some(&bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain {
                what: "erasure probability",
                value: bad,
            });
        }
        Ok(Self {
            level: len.trailing_zeros(),
            values,
        })
    }

    /// Applies one transform step to every entry. Child `2i` is the `−` branch
    /// of entry `i`, child `2i + 1` the `+` branch.
    pub fn next_level(&self, delta: f64) -> ZTable {
        let mut values = Vec::with_capacity(self.values.len() * 2);
        for &z in &self.values {
            values.push(minus_faulty_raw(z, delta));
            values.push(plus_faulty_raw(z, delta));
        }
        ZTable {
            level: self.level + 1,
            values,
        }
    }

    pub(crate) fn next_level_fault_free(&self) -> ZTable {
        let mut values = Vec::with_capacity(self.values.len() * 2);
        for &z in &self.values {
            values.push(minus_raw(z));
            values.push(plus_raw(z));
        }
        ZTable {
            level: self.level + 1,
            values,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        self.values.get(index).copied()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mean of all entries, using compensated summation.
    pub fn mean(&self) -> f64 {
        neumaier_sum(self.values.iter().copied()) / self.values.len() as f64
    }

    /// Fraction of entries strictly above `threshold`.
    pub fn fraction_above(&self, threshold: f64) -> f64 {
        let count = self.values.iter().filter(|&&z| z > threshold).count();
        count as f64 / self.values.len() as f64
    }

    /// Indices ordered by ascending erasure probability, ties by ascending index.
    pub fn ascending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]).then(a.cmp(&b)));
        order
    }

    /// CSV in index order: `index,sign_string,z_value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        writeln!(out, "index,sign_string,z_value")?;
        for (i, &z) in self.values.iter().enumerate() {
            let signs = SignString::from_index(i, self.level)?;
            writeln!(out, "{i},{signs},{}", fmt_f64(z))?;
        }
        Ok(())
    }

    /// CSV sorted by ascending erasure probability:
    /// `rank,normalized_rank,index,sign_string,z_value`.
    pub fn write_sorted_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        writeln!(out, "rank,normalized_rank,index,sign_string,z_value")?;
        let len = self.values.len() as f64;
        for (rank, i) in self.ascending_order().into_iter().enumerate() {
            let signs = SignString::from_index(i, self.level)?;
            writeln!(
                out,
                "{rank},{},{i},{signs},{}",
                fmt_f64(rank as f64 / len),
                fmt_f64(self.values[i])
            )?;
        }
        Ok(())
    }
}

pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Erasure probabilities of all `2^n` synthetic channels.
///
/// Faulty transforms are used for the first `n − min(protected_levels, n)` steps
/// and fault-free transforms for the protected levels nearest the root.
/// `protected_levels = n + 1` is accepted and means a fully fault-free decoder.
pub fn compute_z_table(
    n: u32,
    p: ErasureProb,
    delta: FaultProb,
    protected_levels: u32,
) -> Result<ZTable> {
    if protected_levels > n + 1 {
        return Err(Error::invalid(format!(
            "protected_levels = {protected_levels} exceeds n + 1 = {}",
            n + 1
        )));
    }
    checked_pow2(n)?;
    let n_u = unprotected_levels(n, protected_levels);
    let mut table = ZTable::root(p);
    for level in 1..=n {
        table = if level <= n_u {
            table.next_level(delta.get())
        } else {
            table.next_level_fault_free()
        };
    }
    Ok(table)
}

/// `E[ε_s] = 1 − (1 − p)(1 − δ)^s`.
pub fn expected_epsilon(p: ErasureProb, delta: FaultProb, s: u32) -> ErasureProb {
    let survive = (1.0 - delta.get()).powi(s as i32);
    ErasureProb((1.0 - (1.0 - p.get()) * survive).clamp(0.0, 1.0))
}

/// The realization of the faulty polarization process along a fixed branch
/// sequence. The returned path starts with `p` and has `signs.len() + 1` entries.
pub fn epsilon_path_along(p: ErasureProb, delta: FaultProb, signs: &SignString) -> Vec<ErasureProb> {
    let mut path = Vec::with_capacity(signs.signs().len() + 1);
    let mut eps = p;
    path.push(eps);
    for sign in signs.signs() {
        eps = match sign {
            Sign::Minus => t_minus_faulty(eps, delta),
            Sign::Plus => t_plus_faulty(eps, delta),
        };
        path.push(eps);
    }
    path
}

/// Samples `s` steps of the faulty polarization process, choosing each branch
/// with probability 1/2. Deterministic for a fixed seed.
pub fn sample_epsilon_path(p: ErasureProb, delta: FaultProb, s: u32, seed: u64) -> Vec<ErasureProb> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signs = (0..s)
        .map(|_| if rng.random::<bool>() { Sign::Plus } else { Sign::Minus })
        .collect();
    epsilon_path_along(p, delta, &SignString::new(signs))
}
