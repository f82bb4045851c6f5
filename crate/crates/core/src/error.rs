//! Error taxonomy shared by every module.
//!
//! The CLI maps these onto exit codes: parse/spec errors -> 2,
//! precondition failures -> 3, numeric/resolution/geometry trouble -> 4.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    /// Argument outside the mathematical domain (|z| >= 1, p < 1, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed symbol string, family spec, or file content.
    #[error("parse error: {0}")]
    Parse(String),

    /// Non-finite samples, divergent Newton iteration, and the like.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Grid or sample count too coarse for the requested quantity.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A stated precondition of the operation does not hold.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// Operation not supported for this input (e.g. multivalent symbol).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A geometric consistency check failed (e.g. window covering).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Series truncation lost a non-negligible tail; carries the estimate.
    #[error("truncation warning: estimated tail mass {tail_bound:e}")]
    Truncation { tail_bound: f64 },

    /// Statistical resolution: the Monte Carlo sample cannot certify the claim.
    #[error("statistical-resolution error: {0}")]
    Statistical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
