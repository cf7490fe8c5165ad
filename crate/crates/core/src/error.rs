//! Error type shared by every module.

use thiserror::Error;

/// Failure modes. The CLI maps them to exit codes 2, 3 and 1.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or out-of-domain input.
    #[error("invalid input: {0}")]
    Validation(String),
    /// A brute-force enumeration would exceed its size cap.
    #[error("enumeration of {what} needs {size} terms, cap is {cap}")]
    EnumerationCap { what: String, size: u128, cap: u128 },
    /// An identity that must hold failed; the message names it.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
