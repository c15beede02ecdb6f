use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    /// The truncated environment carries too much probability outside the kept levels.
    #[error("truncation too small: leakage {leakage:.3e} at dim {dim}, need dim >= {required}")]
    Truncation {
        dim: usize,
        leakage: f64,
        required: usize,
    },

    #[error("tolerance violated in {what}: {value:.3e} > {limit:.3e}")]
    Tolerance {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("smoothing parameter {epsilon} is infeasible, cap is {cap}")]
    Infeasible { epsilon: f64, cap: f64 },

    #[error("no delta table entry for n = {0}")]
    MissingDelta(u64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
