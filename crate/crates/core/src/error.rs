//! Error type shared across the simulator.

use thiserror::Error;

/// Errors surfaced by configuration validation and the numerical pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A configuration field failed validation.
    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    /// A config file line could not be parsed.
    #[error("config parse error on line {line}: {reason}")]
    ConfigParse { line: usize, reason: String },

    /// An argument was outside the mathematical domain of an operation.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// A matrix handed to the zero-forcing precoder is (numerically) rank
    /// deficient. `rows` lists the offending row indices, as positions into
    /// the matrix that was being inverted.
    #[error("rank-deficient matrix in {op}; offending rows {rows:?}")]
    RankDeficient { op: &'static str, rows: Vec<usize> },

    /// Every spectrum row (or channel row) is zero; nothing to schedule.
    #[error("all-zero input in {op}: no user carries power")]
    ZeroInput { op: &'static str },

    /// A matrix that must be Toeplitz deviates beyond tolerance.
    #[error("matrix is not Toeplitz: max diagonal deviation {max_dev:.3e} exceeds tolerance {tol:.3e}")]
    NotToeplitz { max_dev: f64, tol: f64 },

    /// Rejection sampling failed to terminate within its cap.
    #[error("rejection sampling exhausted {cap} attempts in {op}; check exclusion_factor")]
    SamplingExhausted { op: &'static str, cap: u64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
