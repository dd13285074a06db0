//! Frame erasure rate bounds.
//!
//! The upper bound is the union bound `Σ_{i∈A} Z_i`. The lower bound is the
//! second-order Bonferroni bound
//!
//! ```text
//! Σ_{i∈A} Z_i − Σ_{i<j ∈ A} (Z_i Z_j + C_ij)
//! ```
//!
//! where `C` is the covariance matrix of the erasure indicators of the `2^n`
//! synthetic channels. `C` is built level by level from the leaves. When a
//! bound stops being informative it is replaced by its trivial counterpart
//! (`1` for the upper bound, `max_{i∈A} Z_i` for the lower bound).

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::construction::{k_from_rate, select_info_set, CodeSpec, InfoSet};
use crate::error::{Error, Result};
use crate::format::{fmt_f64, CSV_HEADER};
use crate::polarization::{
    compute_z_table, level_delta, neumaier_sum, unprotected_levels, ErasureProb, FaultProb, ZTable,
};

/// Default largest `n` for which the dense covariance matrix is built.
pub const DEFAULT_COVARIANCE_CAP: u32 = 13;

/// Dense symmetric covariance matrix of the erasure indicators at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    level: u32,
    dim: usize,
    entries: Vec<f64>,
}

impl CovarianceMatrix {
    /// Level 0: the variance `p(1 − p)` of a single channel erasure.
    pub fn root(p: ErasureProb) -> Self {
        let p = p.get();
        Self {
            level: 0,
            dim: 1,
            entries: vec![p * (1.0 - p)],
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

fn bytes_for_level(n: u32) -> u128 {
    let dim = 1u128 << n;
    dim * dim * std::mem::size_of::<f64>() as u128
}

fn check_step_inputs(c_prev: &CovarianceMatrix, z_prev: &ZTable) -> Result<()> {
    if c_prev.dim != z_prev.len() {
        return Err(Error::DimensionMismatch {
            expected: c_prev.dim,
            actual: z_prev.len(),
        });
    }
    Ok(())
}

/// Builds the next level from a per-entry rule. Entries are always evaluated
/// with the smaller index first so the result is exactly symmetric.
fn build_level<F>(c_prev: &CovarianceMatrix, z_next: &ZTable, off_diagonal: F) -> CovarianceMatrix
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let dim = c_prev.dim * 2;
    let z = z_next.values();
    let mut entries = vec![0.0f64; dim * dim];
    entries
        .par_chunks_mut(dim)
        .enumerate()
        .for_each(|(i, row)| {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = match i.cmp(&j) {
                    std::cmp::Ordering::Equal => z[i] * (1.0 - z[i]),
                    std::cmp::Ordering::Less => off_diagonal(i, j),
                    std::cmp::Ordering::Greater => off_diagonal(j, i),
                };
            }
        });
    CovarianceMatrix {
        level: c_prev.level + 1,
        dim,
        entries,
    }
}

/// Pairwise covariance of two children given their parents' erasure
/// probabilities `za`, `zb` and the parents' covariance `c`.
#[inline]
fn child_covariance(sign_a: usize, sign_b: usize, za: f64, zb: f64, c: f64) -> f64 {
    match (sign_a, sign_b) {
        (0, 0) => 2.0 * (1.0 - za) * (1.0 - zb) * c + c * c,
        (0, _) => 2.0 * (1.0 - za) * zb * c - c * c,
        (_, 0) => 2.0 * za * (1.0 - zb) * c - c * c,
        _ => 2.0 * za * zb * c + c * c,
    }
}

/// One level of the covariance recursion under faulty decoding.
///
/// Off-diagonal entries come from the parents' covariance scaled by
/// `(1 − δ)²`; children of the same parent use the parent's variance. The
/// diagonal is the Bernoulli variance `Z(1 − Z)` of the level's own table.
pub fn covariance_step(
    c_prev: &CovarianceMatrix,
    z_prev: &ZTable,
    delta_level: FaultProb,
) -> Result<CovarianceMatrix> {
    check_step_inputs(c_prev, z_prev)?;
    let delta = delta_level.get();
    let z_next = z_prev.next_level(delta);
    let scale = (1.0 - delta) * (1.0 - delta);
    let z = z_prev.values();
    Ok(build_level(c_prev, &z_next, |lo, hi| {
        let (a, b) = (lo >> 1, hi >> 1);
        scale * child_covariance(lo & 1, hi & 1, z[a], z[b], c_prev.get(a, b))
    }))
}

/// The fault-free recursion, kept as its own code path for cross-checking.
pub fn covariance_step_fault_free(
    c_prev: &CovarianceMatrix,
    z_prev: &ZTable,
) -> Result<CovarianceMatrix> {
    check_step_inputs(c_prev, z_prev)?;
    let z_next = z_prev.next_level(0.0);
    let z = z_prev.values();
    Ok(build_level(c_prev, &z_next, |lo, hi| {
        let (a, b) = (lo >> 1, hi >> 1);
        child_covariance(lo & 1, hi & 1, z[a], z[b], c_prev.get(a, b))
    }))
}

/// Z table and covariance matrix of a spec, both at level `n`.
#[derive(Debug, Clone)]
pub struct LevelStatistics {
    pub z: ZTable,
    pub covariance: CovarianceMatrix,
}

/// Runs the covariance recursion for `spec.n` levels, refusing when the
/// dense matrix would exceed `cap`.
pub fn compute_statistics(spec: &CodeSpec, cap: u32) -> Result<LevelStatistics> {
    if spec.n > cap {
        return Err(Error::ResourceCap {
            n: spec.n,
            cap,
            bytes: bytes_for_level(spec.n),
        });
    }
    let n_u = unprotected_levels(spec.n, spec.protected_levels);
    let mut z = ZTable::root(spec.p);
    let mut c = CovarianceMatrix::root(spec.p);
    for level in 1..=spec.n {
        let delta = level_delta(level, n_u, spec.delta.get());
        // level_delta returns either spec.delta or 0, both valid
        c = covariance_step(&c, &z, FaultProb::new(delta)?)?;
        z = z.next_level(delta);
    }
    debug_assert_eq!(z, spec.z_table()?);
    Ok(LevelStatistics { z, covariance: c })
}

/// Level-`n` covariance matrix with the default cap.
pub fn compute_covariance(spec: &CodeSpec) -> Result<CovarianceMatrix> {
    compute_covariance_with_cap(spec, DEFAULT_COVARIANCE_CAP)
}

pub fn compute_covariance_with_cap(spec: &CodeSpec, cap: u32) -> Result<CovarianceMatrix> {
    compute_statistics(spec, cap).map(|s| s.covariance)
}

/// Upper and lower bounds on the frame erasure rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FerBounds {
    pub upper: f64,
    pub lower: f64,
    pub upper_trivialized: bool,
    pub lower_trivialized: bool,
}

impl FerBounds {
    pub const ZERO: FerBounds = FerBounds {
        upper: 0.0,
        lower: 0.0,
        upper_trivialized: false,
        lower_trivialized: false,
    };

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// True when `[lo, hi]` intersects `[lower, upper]`.
    pub fn overlaps(&self, lo: f64, hi: f64) -> bool {
        lo <= self.upper && self.lower <= hi
    }
}

fn union_sum(z: &ZTable, info: &InfoSet) -> (f64, f64) {
    let values = z.values();
    let sum = neumaier_sum(info.indices().iter().map(|&i| values[i]));
    let max = info
        .indices()
        .iter()
        .map(|&i| values[i])
        .fold(0.0, f64::max);
    (sum, max)
}

fn finish(sum: f64, bonferroni: f64, max_z: f64) -> FerBounds {
    let (upper, upper_trivialized) = if sum > 1.0 { (1.0, true) } else { (sum, false) };
    let (lower, lower_trivialized) = if bonferroni < max_z {
        (max_z, true)
    } else {
        (bonferroni, false)
    };
    FerBounds {
        upper,
        lower: lower.min(upper),
        upper_trivialized,
        lower_trivialized,
    }
}

/// Bounds from the union bound alone, with the trivial `max Z` lower bound.
pub fn trivial_bounds(z: &ZTable, info: &InfoSet) -> FerBounds {
    if info.is_empty() {
        return FerBounds::ZERO;
    }
    let (sum, max_z) = union_sum(z, info);
    let mut b = finish(sum, max_z, max_z);
    b.lower_trivialized = true;
    b
}

/// Bounds for an information set given the level-`n` statistics.
pub fn fer_bounds_from(stats: &LevelStatistics, info: &InfoSet) -> Result<FerBounds> {
    if stats.z.len() != 1usize << info.n() {
        return Err(Error::DimensionMismatch {
            expected: stats.z.len(),
            actual: 1usize << info.n(),
        });
    }
    if info.is_empty() {
        return Ok(FerBounds::ZERO);
    }
    let z = stats.z.values();
    let idx = info.indices();
    let (sum, max_z) = union_sum(&stats.z, info);
    let pair_sum: f64 = (0..idx.len())
        .into_par_iter()
        .map(|a| {
            let i = idx[a];
            let row = stats.covariance.row(i);
            neumaier_sum(idx[a + 1..].iter().map(|&j| z[i] * z[j] + row[j]))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, |acc, x| acc + x);
    Ok(finish(sum, sum - pair_sum, max_z))
}

/// Bounds for a spec and its information set, with the default covariance cap.
pub fn fer_bounds(spec: &CodeSpec, info: &InfoSet) -> Result<FerBounds> {
    if info.n() != spec.n {
        return Err(Error::DimensionMismatch {
            expected: 1usize << spec.n,
            actual: 1usize << info.n(),
        });
    }
    if info.is_empty() {
        return Ok(FerBounds::ZERO);
    }
    let stats = compute_statistics(spec, DEFAULT_COVARIANCE_CAP)?;
    fer_bounds_from(&stats, info)
}

/// Bounds at several rates for one blocklength; the covariance is built once.
pub fn bounds_sweep_rate(
    n: u32,
    p: ErasureProb,
    delta: FaultProb,
    protected_levels: u32,
    rates: &[f64],
) -> Result<Vec<(f64, FerBounds)>> {
    bounds_sweep_rate_with_cap(n, p, delta, protected_levels, rates, DEFAULT_COVARIANCE_CAP)
}

pub fn bounds_sweep_rate_with_cap(
    n: u32,
    p: ErasureProb,
    delta: FaultProb,
    protected_levels: u32,
    rates: &[f64],
    cap: u32,
) -> Result<Vec<(f64, FerBounds)>> {
    let ks = rates
        .iter()
        .map(|&r| k_from_rate(n, r))
        .collect::<Result<Vec<_>>>()?;
    let spec = CodeSpec::new(n, 0, p, delta, protected_levels)?;
    let stats = compute_statistics(&spec, cap)?;
    rates
        .iter()
        .zip(ks)
        .map(|(&rate, k)| {
            let info = select_info_set(&stats.z, k)?;
            Ok((rate, fer_bounds_from(&stats, &info)?))
        })
        .collect()
}

/// Upper bounds only, which need no covariance and therefore no cap.
pub fn upper_bound_sweep_rate(
    n: u32,
    p: ErasureProb,
    delta: FaultProb,
    protected_levels: u32,
    rates: &[f64],
) -> Result<Vec<(f64, FerBounds)>> {
    let z = compute_z_table(n, p, delta, protected_levels)?;
    rates
        .iter()
        .map(|&rate| {
            let info = select_info_set(&z, k_from_rate(n, rate)?)?;
            Ok((rate, trivial_bounds(&z, &info)))
        })
        .collect()
}

/// Bounds for one rate at one blocklength, as used by the `n` sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsRow {
    pub n: u32,
    pub k: usize,
    pub bounds: FerBounds,
    /// The covariance was not built (above cap); the lower bound is `max Z`.
    pub covariance_skipped: bool,
}

/// Bounds at a fixed rate for every `n` in `ns`. Blocklengths above `cap`
/// fall back to trivial lower bounds instead of failing.
pub fn bounds_sweep_n(
    ns: impl IntoIterator<Item = u32>,
    rate: f64,
    p: ErasureProb,
    delta: FaultProb,
    protected_levels: impl Fn(u32) -> u32,
    cap: u32,
) -> Result<Vec<BoundsRow>> {
    ns.into_iter()
        .map(|n| {
            let spec = CodeSpec::with_rate(n, rate, p, delta, protected_levels(n))?;
            if n > cap {
                let z = spec.z_table()?;
                let info = select_info_set(&z, spec.k)?;
                return Ok(BoundsRow {
                    n,
                    k: spec.k,
                    bounds: trivial_bounds(&z, &info),
                    covariance_skipped: true,
                });
            }
            let stats = compute_statistics(&spec, cap)?;
            let info = select_info_set(&stats.z, spec.k)?;
            Ok(BoundsRow {
                n,
                k: spec.k,
                bounds: fer_bounds_from(&stats, &info)?,
                covariance_skipped: false,
            })
        })
        .collect()
}

fn write_bounds_fields<W: Write>(out: &mut W, key: &str, b: &FerBounds) -> Result<()> {
    writeln!(
        out,
        "{key},{},{},{},{}",
        fmt_f64(b.upper),
        fmt_f64(b.lower),
        b.upper_trivialized,
        b.lower_trivialized
    )?;
    Ok(())
}

/// CSV `rate,upper,lower,upper_trivialized,lower_trivialized`.
pub fn write_rate_sweep_csv<W: Write>(mut out: W, rows: &[(f64, FerBounds)]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    writeln!(out, "rate,upper,lower,upper_trivialized,lower_trivialized")?;
    for (rate, b) in rows {
        write_bounds_fields(&mut out, &fmt_f64(*rate), b)?;
    }
    Ok(())
}

/// CSV `n,upper,lower,upper_trivialized,lower_trivialized`.
pub fn write_n_sweep_csv<W: Write>(mut out: W, rows: &[BoundsRow]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    writeln!(out, "n,upper,lower,upper_trivialized,lower_trivialized")?;
    for row in rows {
        write_bounds_fields(&mut out, &row.n.to_string(), &row.bounds)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ep(v: f64) -> ErasureProb {
        ErasureProb::new(v).unwrap()
    }

    fn fp(v: f64) -> FaultProb {
        FaultProb::new(v).unwrap()
    }

    #[test]
    fn level_one_sibling_covariance() {
        let c0 = CovarianceMatrix::root(ep(0.5));
        assert_eq!(c0.get(0, 0), 0.25);
        let z0 = ZTable::root(ep(0.5));
        let c1 = covariance_step(&c0, &z0, fp(0.0)).unwrap();
        assert_eq!(c1.get(0, 1), 0.0625);
        assert_eq!(c1.get(1, 0), 0.0625);
        assert_eq!(c1.get(0, 0), 0.75 * 0.25);
        assert_eq!(c1.get(1, 1), 0.25 * 0.75);
    }

    #[test]
    fn independent_parents_give_independent_children() {
        let c = CovarianceMatrix {
            level: 1,
            dim: 2,
            entries: vec![0.1875, 0.0, 0.0, 0.1875],
        };
        let z = ZTable::from_values(vec![0.75, 0.25]).unwrap();
        let next = covariance_step(&c, &z, fp(0.1)).unwrap();
        for i in 0..2 {
            for j in 2..4 {
                assert_eq!(next.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let c0 = CovarianceMatrix::root(ep(0.5));
        let z1 = ZTable::from_values(vec![0.75, 0.25]).unwrap();
        assert!(matches!(
            covariance_step(&c0, &z1, fp(0.0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cap_is_enforced() {
        let spec = CodeSpec::new(9, 4, ep(0.5), fp(0.0), 0).unwrap();
        let err = compute_covariance_with_cap(&spec, 8).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { n: 9, cap: 8, .. }));
        assert!(err.to_string().contains("O(4^n)"));
    }

    #[test]
    fn structural_invariants() {
        for &(n, p, d, np) in &[(6u32, 0.5, 1e-2, 0u32), (7, 0.3, 0.2, 3), (5, 0.9, 0.0, 0)] {
            let spec = CodeSpec::new(n, 0, ep(p), fp(d), np).unwrap();
            let stats = compute_statistics(&spec, 13).unwrap();
            let c = &stats.covariance;
            for i in 0..c.dim() {
                let z = stats.z.values()[i];
                assert!((c.get(i, i) - z * (1.0 - z)).abs() <= 1e-12);
                for j in 0..c.dim() {
                    assert_eq!(c.get(i, j).to_bits(), c.get(j, i).to_bits());
                    assert!(c.get(i, j).abs() <= 0.25 + 1e-15);
                }
            }
        }
    }

    #[test]
    fn zero_delta_matches_fault_free_recursion_bitwise() {
        let p = ep(0.37);
        let mut z = ZTable::root(p);
        let mut faulty = CovarianceMatrix::root(p);
        let mut free = CovarianceMatrix::root(p);
        for _ in 0..7 {
            faulty = covariance_step(&faulty, &z, FaultProb::ZERO).unwrap();
            free = covariance_step_fault_free(&free, &z).unwrap();
            z = z.next_level(0.0);
            assert_eq!(faulty, free);
        }
    }

    #[test]
    fn single_channel_bounds_are_exact() {
        let spec = CodeSpec::new(0, 1, ep(0.5), fp(1e-3), 0).unwrap();
        let b = fer_bounds(&spec, &spec.info_set().unwrap()).unwrap();
        assert_eq!((b.upper, b.lower), (0.5, 0.5));

        let spec = CodeSpec::new(5, 1, ep(0.5), fp(1e-3), 0).unwrap();
        let info = spec.info_set().unwrap();
        let z = spec.z_table().unwrap().values()[info.indices()[0]];
        let b = fer_bounds(&spec, &info).unwrap();
        assert_eq!((b.upper, b.lower), (z, z));
    }

    #[test]
    fn empty_info_set_gives_zero_bounds() {
        let spec = CodeSpec::new(4, 0, ep(0.5), fp(1e-3), 0).unwrap();
        let b = fer_bounds(&spec, &spec.info_set().unwrap()).unwrap();
        assert_eq!(b, FerBounds::ZERO);
        let sweep = bounds_sweep_rate(4, ep(0.5), fp(1e-3), 0, &[0.0]).unwrap();
        assert_eq!(sweep, vec![(0.0, FerBounds::ZERO)]);
    }

    #[test]
    fn low_rate_bounds_nearly_coincide() {
        let rates = [0.1, 0.2, 0.3];
        for (rate, b) in bounds_sweep_rate(10, ep(0.5), fp(1e-6), 0, &rates).unwrap() {
            assert!(!b.lower_trivialized && !b.upper_trivialized, "rate {rate}");
            let gap = (b.upper - b.lower) / b.upper;
            assert!(gap < 0.05, "rate {rate}: relative gap {gap}");
        }
    }

    #[test]
    fn high_rates_trivialize() {
        let sweep = bounds_sweep_rate(10, ep(0.5), fp(1e-6), 0, &[0.45, 0.6]).unwrap();
        for (_, b) in sweep {
            assert!(b.upper_trivialized && b.lower_trivialized);
            assert_eq!(b.upper, 1.0);
            assert!(b.lower <= b.upper);
        }
    }

    #[test]
    fn upper_bound_grows_with_rate() {
        let rates: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
        let sweep = bounds_sweep_rate(8, ep(0.5), fp(1e-6), 0, &rates).unwrap();
        for pair in sweep.windows(2) {
            assert!(pair[0].1.upper <= pair[1].1.upper);
        }
        for (_, b) in &sweep {
            assert!(0.0 <= b.lower && b.lower <= b.upper && b.upper <= 1.0);
        }
    }

    #[test]
    fn upper_only_sweep_agrees_with_full_sweep() {
        let rates = [0.1, 0.25, 0.5];
        let full = bounds_sweep_rate(9, ep(0.5), fp(1e-4), 2, &rates).unwrap();
        let upper = upper_bound_sweep_rate(9, ep(0.5), fp(1e-4), 2, &rates).unwrap();
        for (a, b) in full.iter().zip(&upper) {
            assert_eq!(a.1.upper, b.1.upper);
        }
    }

    #[test]
    fn n_sweep_falls_back_above_cap() {
        let rows = bounds_sweep_n(3..=6, 0.25, ep(0.5), fp(1e-6), |_| 0, 4).unwrap();
        assert_eq!(rows.iter().filter(|r| r.covariance_skipped).count(), 2);
        for r in &rows {
            assert!(r.bounds.lower <= r.bounds.upper);
        }
    }

    #[test]
    fn csv_layout() {
        let rows = bounds_sweep_rate(4, ep(0.5), fp(0.0), 0, &[0.25]).unwrap();
        let mut buf = Vec::new();
        write_rate_sweep_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "rate,upper,lower,upper_trivialized,lower_trivialized");
        assert!(lines[2].starts_with("2.5000000000000000e-1,"));
    }
}
