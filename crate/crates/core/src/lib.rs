//! Polar codes over the binary erasure channel decoded by a successive
//! cancellation decoder whose memory writes may erase messages.
//!
//! The crate covers channel polarization with decoder faults, code
//! construction, analytic FER bounds, an encoder and faulty decoder, a seeded
//! Monte-Carlo harness and blocklength optimization.

pub mod bounds;
pub mod codec;
pub mod construction;
pub mod error;
pub mod format;
pub mod montecarlo;
pub mod optimizer;
pub mod polarization;

pub use bounds::{
    compute_covariance, fer_bounds, BoundsRow, CovarianceMatrix, FerBounds, LevelStatistics,
    DEFAULT_COVARIANCE_CAP,
};
pub use codec::{
    indicator_tree, polar_encode, sc_decode, Bit, DecodeResult, DecodeStatus, FaultPattern,
    FaultSource, Message, NoFaults, ScDecoder,
};
pub use construction::{
    protection_report, rate_loss, select_info_set, CodeDefinition, CodeSpec, InfoSet,
    ProtectionReport,
};
pub use error::{Error, Result};
pub use montecarlo::{estimate_fer, FerEstimate, SimOptions, ValidationReport};
pub use optimizer::{optimal_blocklength, BlocklengthDecision, DecisionMethod};
pub use polarization::{compute_z_table, ErasureProb, FaultProb, Sign, SignString, ZTable};
