use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} must lie in [0, 1], got {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("index {index} out of range for level {level} (expected < {bound})")]
    IndexOutOfRange { index: usize, level: u32, bound: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error(
        "dense covariance at n = {n} exceeds the configured cap n <= {cap} \
         (O(4^n) memory: {bytes} bytes per level)"
    )]
    ResourceCap { n: u32, cap: u32, bytes: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by bad user input rather than resource limits or IO.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::IndexOutOfRange { .. }
                | Error::InvalidParameter(_)
                | Error::DimensionMismatch { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
