//! Choice of the FER-minimizing blocklength for a fixed rate.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{bounds_sweep_n, BoundsRow, DEFAULT_COVARIANCE_CAP};
use crate::construction::CodeSpec;
use crate::error::{Error, Result};
use crate::format::{fmt_f64, fmt_opt_f64, CSV_HEADER};
use crate::montecarlo::{estimate_fer, FerEstimate};
use crate::polarization::{ErasureProb, FaultProb};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionMethod {
    /// One blocklength's upper bound lies below every other lower bound.
    AnalyticUnique,
    /// The channel is more reliable than the decoder, so coding cannot help.
    UncodedShortcut,
    /// Overlapping bound intervals were separated by simulation.
    MonteCarloTiebreak,
}

/// One row of the decision table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecisionRow {
    #[serde(flatten)]
    pub row: BoundsRow,
    pub mc: Option<FerEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlocklengthDecision {
    pub n_star: u32,
    pub method: DecisionMethod,
    pub table: Vec<DecisionRow>,
    /// Exponents that were simulated in a tiebreak.
    pub candidates: Vec<u32>,
    /// Some rows exceeded the covariance cap and carry trivial lower bounds.
    pub covariance_capped: bool,
}

impl BlocklengthDecision {
    /// CSV `n,N,K,upper,lower,mc_fer,chosen`; `mc_fer` is empty when not simulated.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        writeln!(out, "n,N,K,upper,lower,mc_fer,chosen")?;
        for r in &self.table {
            let n = r.row.n;
            writeln!(
                out,
                "{n},{},{},{},{},{},{}",
                1u64 << n,
                r.row.k,
                fmt_f64(r.row.bounds.upper),
                fmt_f64(r.row.bounds.lower),
                fmt_opt_f64(r.mc.map(|m| m.fer)),
                n == self.n_star
            )?;
        }
        Ok(())
    }
}

/// Bounds for every `n` in `0..=n_max` at `K = ⌈R·2^n⌉`, without protection.
pub fn bounds_table(rate: f64, p: ErasureProb, delta: FaultProb, n_max: u32) -> Result<Vec<BoundsRow>> {
    let mut rows: Vec<BoundsRow> = (0..=n_max)
        .into_par_iter()
        .map(|n| bounds_sweep_n([n], rate, p, delta, |_| 0, DEFAULT_COVARIANCE_CAP).map(|mut v| v.remove(0)))
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| r.n);
    Ok(rows)
}

/// The exponent whose upper bound does not exceed any other row's lower
/// bound, if exactly one such exponent exists.
pub fn unique_minimizer(rows: &[BoundsRow]) -> Option<u32> {
    let winners: Vec<u32> = rows
        .iter()
        .filter(|a| {
            rows.iter()
                .all(|b| b.n == a.n || a.bounds.upper <= b.bounds.lower)
        })
        .map(|a| a.n)
        .collect();
    match winners.as_slice() {
        [n] => Some(*n),
        _ => None,
    }
}

/// Exponents whose bound interval reaches down to the smallest upper bound.
pub fn overlap_candidates(rows: &[BoundsRow]) -> Vec<u32> {
    let Some(best) = rows
        .iter()
        .min_by(|a, b| a.bounds.upper.total_cmp(&b.bounds.upper).then(a.n.cmp(&b.n)))
    else {
        return Vec::new();
    };
    rows.iter()
        .filter(|r| r.bounds.lower <= best.bounds.upper)
        .map(|r| r.n)
        .collect()
}

pub fn optimal_blocklength(
    rate: f64,
    p: ErasureProb,
    delta: FaultProb,
    n_max: u32,
    mc_budget: u64,
    seed: u64,
) -> Result<BlocklengthDecision> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::Domain {
            what: "code rate",
            value: rate,
        });
    }
    if p.get() < delta.get() {
        return Ok(BlocklengthDecision {
            n_star: 0,
            method: DecisionMethod::UncodedShortcut,
            table: Vec::new(),
            candidates: Vec::new(),
            covariance_capped: false,
        });
    }

    let rows = bounds_table(rate, p, delta, n_max)?;
    let covariance_capped = rows.iter().any(|r| r.covariance_skipped);
    let mut table: Vec<DecisionRow> = rows.iter().map(|&row| DecisionRow { row, mc: None }).collect();

    if let Some(n_star) = unique_minimizer(&rows) {
        return Ok(BlocklengthDecision {
            n_star,
            method: DecisionMethod::AnalyticUnique,
            table,
            candidates: Vec::new(),
            covariance_capped,
        });
    }

    if mc_budget == 0 {
        return Err(Error::invalid(
            "bounds do not single out a blocklength and the Monte-Carlo budget is zero",
        ));
    }
    let candidates = overlap_candidates(&rows);
    for &n in &candidates {
        let row = &rows[n as usize];
        let spec = CodeSpec::new(n, row.k, p, delta, 0)?;
        table[n as usize].mc = Some(estimate_fer(&spec, mc_budget, seed.wrapping_add(u64::from(n)))?);
    }
    let n_star = candidates
        .iter()
        .copied()
        .min_by(|&a, &b| {
            let fa = table[a as usize].mc.map_or(f64::INFINITY, |m| m.fer);
            let fb = table[b as usize].mc.map_or(f64::INFINITY, |m| m.fer);
            fa.total_cmp(&fb).then(a.cmp(&b))
        })
        .expect("the minimal upper bound is always a candidate");
    Ok(BlocklengthDecision {
        n_star,
        method: DecisionMethod::MonteCarloTiebreak,
        table,
        candidates,
        covariance_capped,
    })
}
