use std::path::PathBuf;

use clap::Args;
use polar_fault_core::construction::k_from_rate;
use polar_fault_core::{CodeSpec, ErasureProb, FaultProb};

use crate::error::{CliError, CliResult};
use crate::output::Format;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Blocklength exponent, N = 2^n.
    #[arg(long, global = true)]
    pub n: Option<u32>,

    /// Code rate; sweeps accept a comma-separated list.
    #[arg(long, global = true, value_delimiter = ',')]
    pub rate: Vec<f64>,

    /// Number of information bits (instead of --rate).
    #[arg(long, global = true)]
    pub k: Option<usize>,

    /// Channel erasure probability.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub p: f64,

    /// Decoder write-fault probability.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub delta: f64,

    /// Decoder levels protected from faults, counted from the decision level.
    #[arg(long, global = true, default_value_t = 0)]
    pub protected_levels: u32,

    /// Monte-Carlo frames (the per-candidate budget for `optimize`).
    #[arg(long, global = true, default_value_t = 100_000)]
    pub trials: u64,

    /// Master seed for all Monte-Carlo runs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Largest blocklength exponent for `n` sweeps and `optimize`.
    #[arg(long, global = true)]
    pub n_max: Option<u32>,

    /// Stop a simulation after this many frame erasures (0 runs every trial).
    #[arg(long, global = true, default_value_t = 200)]
    pub target_erasures: u64,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

pub fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn p(&self) -> CliResult<ErasureProb> {
        Ok(ErasureProb::new(self.p)?)
    }

    pub fn delta(&self) -> CliResult<FaultProb> {
        Ok(FaultProb::new(self.delta)?)
    }

    pub fn require_n(&self) -> CliResult<u32> {
        self.n.ok_or_else(|| config_error("--n is required"))
    }

    /// Rates to sweep, or `default` when none were given. Rejects `--k`.
    pub fn rates_or(&self, default: Vec<f64>) -> CliResult<Vec<f64>> {
        if self.k.is_some() {
            return Err(config_error("this command sweeps rates; use --rate instead of --k"));
        }
        let rates = if self.rate.is_empty() {
            default
        } else {
            self.rate.clone()
        };
        for &r in &rates {
            if !(0.0..=1.0).contains(&r) {
                return Err(config_error(format!("rate {r} outside [0, 1]")));
            }
        }
        Ok(rates)
    }

    /// The single rate of commands that work on one code family.
    pub fn single_rate(&self) -> CliResult<f64> {
        if self.k.is_some() {
            return Err(config_error("this command takes --rate, not --k"));
        }
        match self.rate.as_slice() {
            [r] => Ok(*r),
            [] => Err(config_error("--rate is required")),
            _ => Err(config_error("exactly one --rate value is expected")),
        }
    }

    /// The code defined by `--n` and exactly one of `--rate` / `--k`.
    pub fn code_spec(&self) -> CliResult<CodeSpec> {
        let n = self.require_n()?;
        let k = match (self.rate.as_slice(), self.k) {
            ([], Some(k)) => k,
            ([r], None) => k_from_rate(n, *r)?,
            ([], None) => return Err(config_error("one of --rate or --k is required")),
            (_, Some(_)) => return Err(config_error("--rate and --k are mutually exclusive")),
            (_, None) => return Err(config_error("exactly one --rate value is expected")),
        };
        Ok(CodeSpec::new(n, k, self.p()?, self.delta()?, self.protected_levels)?)
    }
}

/// Rates `lo/100, (lo+1)/100, ..., hi/100`.
pub fn percent_grid(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|i| f64::from(i) / 100.0).collect()
}
