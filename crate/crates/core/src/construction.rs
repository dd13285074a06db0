//! Code instances, information-set selection and protection overhead.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{fmt_f64, CSV_HEADER};
use crate::polarization::{checked_pow2, compute_z_table, ErasureProb, FaultProb, ZTable};

/// A polar code of length `2^n` with `k` information bits, the channel it is
/// designed for and the decoder it runs on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCodeSpec")]
pub struct CodeSpec {
    pub n: u32,
    pub k: usize,
    pub p: ErasureProb,
    pub delta: FaultProb,
    pub protected_levels: u32,
}

#[derive(Deserialize)]
struct RawCodeSpec {
    n: u32,
    k: usize,
    p: ErasureProb,
    delta: FaultProb,
    #[serde(default)]
    protected_levels: u32,
}

impl TryFrom<RawCodeSpec> for CodeSpec {
    type Error = Error;
    fn try_from(raw: RawCodeSpec) -> Result<Self> {
        CodeSpec::new(raw.n, raw.k, raw.p, raw.delta, raw.protected_levels)
    }
}

impl CodeSpec {
    pub fn new(
        n: u32,
        k: usize,
        p: ErasureProb,
        delta: FaultProb,
        protected_levels: u32,
    ) -> Result<Self> {
        let len = checked_pow2(n)?;
        if k > len {
            return Err(Error::invalid(format!("k = {k} exceeds blocklength {len}")));
        }
        if protected_levels > n + 1 {
            return Err(Error::invalid(format!(
                "protected_levels = {protected_levels} exceeds n + 1 = {}",
                n + 1
            )));
        }
        Ok(Self {
            n,
            k,
            p,
            delta,
            protected_levels,
        })
    }

    /// Builds a spec with `k = ⌈rate · 2^n⌉`.
    pub fn with_rate(
        n: u32,
        rate: f64,
        p: ErasureProb,
        delta: FaultProb,
        protected_levels: u32,
    ) -> Result<Self> {
        Self::new(n, k_from_rate(n, rate)?, p, delta, protected_levels)
    }

    pub fn blocklength(&self) -> usize {
        1usize << self.n
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.blocklength() as f64
    }

    pub fn z_table(&self) -> Result<ZTable> {
        compute_z_table(self.n, self.p, self.delta, self.protected_levels)
    }

    pub fn info_set(&self) -> Result<InfoSet> {
        select_info_set(&self.z_table()?, self.k)
    }
}

/// Sorted indices of the synthetic channels that carry information.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoSet {
    n: u32,
    indices: Vec<usize>,
}

impl InfoSet {
    /// Validates that `indices` are strictly increasing and below `2^n`.
    pub fn new(n: u32, indices: Vec<usize>) -> Result<Self> {
        let len = checked_pow2(n)?;
        if let Some(&bad) = indices.iter().find(|&&i| i >= len) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                level: n,
                bound: len,
            });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("info set indices must be strictly increasing"));
        }
        Ok(Self { n, indices })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Per-index membership flags of length `2^n`.
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; 1usize << self.n];
        for &i in &self.indices {
            mask[i] = true;
        }
        mask
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        writeln!(out, "index")?;
        for i in &self.indices {
            writeln!(out, "{i}")?;
        }
        Ok(())
    }
}

/// The `k` indices with the smallest erasure probability, ties broken by the
/// smaller index.
pub fn select_info_set(z: &ZTable, k: usize) -> Result<InfoSet> {
    if k > z.len() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the {} available channels",
            z.len()
        )));
    }
    let mut indices = z.ascending_order();
    indices.truncate(k);
    indices.sort_unstable();
    Ok(InfoSet {
        n: z.level(),
        indices,
    })
}

/// `⌈rate · 2^n⌉`. Products within 1e-9 of an integer are snapped to it first.
pub fn k_from_rate(n: u32, rate: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Domain {
            what: "code rate",
            value: rate,
        });
    }
    let len = checked_pow2(n)? as f64;
    let x = rate * len;
    let nearest = x.round();
    let k = if (x - nearest).abs() < 1e-9 { nearest } else { x.ceil() };
    Ok(k as usize)
}

/// A spec together with its information set, as exchanged in code definition files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCodeDefinition")]
pub struct CodeDefinition {
    pub code: CodeSpec,
    #[serde(serialize_with = "serialize_info")]
    pub info_set: InfoSet,
}

#[derive(Deserialize)]
struct RawCodeDefinition {
    code: CodeSpec,
    info_set: Vec<usize>,
}

impl TryFrom<RawCodeDefinition> for CodeDefinition {
    type Error = Error;
    fn try_from(raw: RawCodeDefinition) -> Result<Self> {
        let info_set = InfoSet::new(raw.code.n, raw.info_set)?;
        if info_set.len() != raw.code.k {
            return Err(Error::invalid(format!(
                "info set has {} entries but k = {}",
                info_set.len(),
                raw.code.k
            )));
        }
        Ok(Self {
            code: raw.code,
            info_set,
        })
    }
}

fn serialize_info<S: serde::Serializer>(info: &InfoSet, s: S) -> Result<S::Ok, S::Error> {
    info.indices.serialize(s)
}

impl CodeDefinition {
    pub fn from_spec(code: CodeSpec) -> Result<Self> {
        Ok(Self {
            info_set: code.info_set()?,
            code,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Cost and benefit of protecting the top `n_p` levels of the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtectionReport {
    pub n_p: u32,
    /// Protected memory elements, `2^{n_p} − 1`.
    pub protected_units: u64,
    /// All memory elements of the decoder tree, `2^{n+1} − 1`.
    pub total_units: u64,
    pub fraction: f64,
    pub rate_loss: f64,
}

/// Capacity lost to `n_u` unprotected levels: `(1 − (1 − δ)^{n_u})(1 − p)`.
pub fn rate_loss(delta: FaultProb, p: ErasureProb, n_u: u32) -> f64 {
    (1.0 - (1.0 - delta.get()).powi(n_u as i32)) * (1.0 - p.get())
}

pub fn protection_report(
    n: u32,
    n_p: u32,
    p: ErasureProb,
    delta: FaultProb,
) -> Result<ProtectionReport> {
    if n_p > n + 1 {
        return Err(Error::invalid(format!(
            "n_p = {n_p} exceeds n + 1 = {}",
            n + 1
        )));
    }
    if n + 1 >= 64 {
        return Err(Error::invalid(format!("n = {n} too large")));
    }
    let protected_units = if n_p == 0 { 0 } else { (1u64 << n_p) - 1 };
    let total_units = (1u64 << (n + 1)) - 1;
    let n_u = (n + 1).saturating_sub(n_p);
    Ok(ProtectionReport {
        n_p,
        protected_units,
        total_units,
        fraction: protected_units as f64 / total_units as f64,
        rate_loss: rate_loss(delta, p, n_u),
    })
}

impl ProtectionReport {
    pub const CSV_COLUMNS: &'static str = "n_p,protected_units,total_units,fraction,rate_loss";

    pub fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.n_p,
            self.protected_units,
            self.total_units,
            fmt_f64(self.fraction),
            fmt_f64(self.rate_loss)
        )
    }
}
