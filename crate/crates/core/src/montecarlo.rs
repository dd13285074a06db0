//! Seeded Monte-Carlo estimation of the frame erasure rate.
//!
//! Frame `i` draws all of its randomness (information bits, channel erasures,
//! decoder faults) from its own ChaCha8 stream `i` under the master seed, so
//! results do not depend on how frames are spread over threads.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{fer_bounds, FerBounds};
use crate::codec::{polar_encode, transmit_bec, Bit, FaultPattern, ScDecoder};
use crate::construction::{CodeSpec, InfoSet};
use crate::error::{Error, Result};
use crate::format::{fmt_f64, CSV_HEADER};
use crate::polarization::unprotected_levels;

/// Frames per scheduling batch; early stopping is checked between batches.
pub const BATCH_FRAMES: u64 = 4096;

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FerEstimate {
    pub trials: u64,
    pub erasures: u64,
    pub fer: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// The erasure target was reached before the trial budget.
    pub stopped_early: bool,
}

impl FerEstimate {
    pub fn from_counts(erasures: u64, trials: u64, stopped_early: bool) -> Self {
        let fer = if trials == 0 {
            0.0
        } else {
            erasures as f64 / trials as f64
        };
        let (lo, hi) = wilson_interval(erasures, trials);
        Self {
            trials,
            erasures,
            fer,
            ci_low: lo.min(fer),
            ci_high: hi.max(fer),
            stopped_early,
        }
    }

    pub const CSV_COLUMNS: &'static str = "trials,erasures,fer,ci_low,ci_high,stopped_early";

    pub fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.trials,
            self.erasures,
            fmt_f64(self.fer),
            fmt_f64(self.ci_low),
            fmt_f64(self.ci_high),
            self.stopped_early
        )
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        writeln!(out, "{}", Self::CSV_COLUMNS)?;
        writeln!(out, "{}", self.csv_fields())?;
        Ok(())
    }
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let x = successes as f64;
    let z2 = Z_95 * Z_95;
    let denom = n + z2;
    let center = (x + z2 / 2.0) / denom;
    let half = Z_95 * (x * (n - x) / n + z2 / 4.0).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    pub trials: u64,
    pub seed: u64,
    /// Stop once this many erasures have been seen (checked per batch).
    pub target_erasures: Option<u64>,
}

impl SimOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            target_erasures: None,
        }
    }

    pub fn with_target(mut self, target: u64) -> Self {
        self.target_erasures = Some(target);
        self
    }
}

/// Per-thread scratch state for simulating frames of one code.
struct FrameRunner<'a> {
    spec: &'a CodeSpec,
    mask: &'a [bool],
    frozen: &'a [Bit],
    unprotected: u32,
    seed: u64,
    decoder: ScDecoder,
    faults: FaultPattern,
    u: Vec<Bit>,
}

impl<'a> FrameRunner<'a> {
    fn new(spec: &'a CodeSpec, mask: &'a [bool], frozen: &'a [Bit], seed: u64) -> Self {
        Self {
            spec,
            mask,
            frozen,
            unprotected: unprotected_levels(spec.n, spec.protected_levels),
            seed,
            decoder: ScDecoder::new(spec.n).expect("validated spec"),
            faults: FaultPattern::none(spec.n),
            u: vec![0; spec.blocklength()],
        }
    }

    /// Returns true if frame `index` ends in a frame erasure.
    fn run(&mut self, index: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        for (i, slot) in self.u.iter_mut().enumerate() {
            *slot = if self.mask[i] {
                rng.random_range(0..2)
            } else {
                self.frozen[i]
            };
        }
        let x = polar_encode(&self.u, self.spec.n).expect("length checked");
        let y = transmit_bec(&x, self.spec.p.get(), &mut rng);
        self.faults
            .resample(self.spec.delta, self.unprotected, &mut rng);
        let result = self
            .decoder
            .decode(&y, self.mask, self.frozen, &self.faults, None)
            .expect("lengths checked");
        debug_assert!(result.is_erasure() || result.decoded_bits == self.u);
        result.is_erasure()
    }
}

/// Estimates the FER of `spec` over `trials` frames, without early stopping.
pub fn estimate_fer(spec: &CodeSpec, trials: u64, seed: u64) -> Result<FerEstimate> {
    estimate_fer_with(spec, &SimOptions::new(trials, seed), |_| {})
}

/// Estimates the FER, reporting the running estimate after every batch.
pub fn estimate_fer_with<P>(spec: &CodeSpec, options: &SimOptions, mut progress: P) -> Result<FerEstimate>
where
    P: FnMut(&FerEstimate),
{
    if options.trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let info = spec.info_set()?;
    let mask = info.mask();
    let frozen = vec![0; spec.blocklength()];

    let mut done = 0u64;
    let mut erasures = 0u64;
    while done < options.trials {
        let end = (done + BATCH_FRAMES).min(options.trials);
        let batch: u64 = (done..end)
            .into_par_iter()
            .map_init(
                || FrameRunner::new(spec, &mask, &frozen, options.seed),
                |runner, frame| u64::from(runner.run(frame)),
            )
            .sum();
        erasures += batch;
        done = end;
        let reached = options.target_erasures.is_some_and(|t| erasures >= t);
        let stopped_early = reached && done < options.trials;
        let estimate = FerEstimate::from_counts(erasures, done, stopped_early);
        progress(&estimate);
        if reached {
            return Ok(estimate);
        }
    }
    Ok(FerEstimate::from_counts(erasures, done, false))
}

/// Simulated FER checked against the analytic bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub bounds: FerBounds,
    pub estimate: FerEstimate,
    /// The 95% interval of the estimate intersects `[lower, upper]`.
    pub pass: bool,
}

pub fn validate_bounds(spec: &CodeSpec, info: &InfoSet, trials: u64, seed: u64) -> Result<ValidationReport> {
    if info != &spec.info_set()? {
        return Err(Error::invalid(
            "info set does not match the spec's construction",
        ));
    }
    let bounds = fer_bounds(spec, info)?;
    let estimate = estimate_fer(spec, trials, seed)?;
    let pass = info.is_empty() || bounds.overlaps(estimate.ci_low, estimate.ci_high);
    Ok(ValidationReport {
        bounds,
        estimate,
        pass,
    })
}
