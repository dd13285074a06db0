//! Fixtures shared by the benchmarks.

use polar_fault_core::{CodeSpec, ErasureProb, FaultProb};

/// The reference operating point: a BEC(0.5) and decoder fault probability 1e-6.
pub fn reference_spec(n: u32, rate: f64) -> CodeSpec {
    CodeSpec::with_rate(
        n,
        rate,
        ErasureProb::new(0.5).expect("valid"),
        FaultProb::new(1e-6).expect("valid"),
        0,
    )
    .expect("valid spec")
}
