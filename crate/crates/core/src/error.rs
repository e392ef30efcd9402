//! Failure categories shared across the crate.

use thiserror::Error;

/// Everything that can go wrong, grouped by what the caller should do about
/// it. The CLI maps the variants onto distinct process exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Structurally or physically invalid input (bad dimensions, non-Hermitian
    /// operators, unnormalized amplitudes, out-of-domain parameters).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The requested object exceeds a hard size limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A numerical routine could not meet its accuracy contract.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
