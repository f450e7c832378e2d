//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the solvers and statistics layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method exhausted its iteration budget.
    #[error("did not converge: {0}")]
    NonConvergence(String),

    /// A bracketing step failed where theory guarantees a sign change;
    /// indicates an internal inconsistency rather than bad input.
    #[error("bracket failure: {0}")]
    Bracket(String),

    /// A computation left the representable floating-point range.
    #[error("numerical overflow: {0}")]
    Overflow(String),

    /// A statistic was requested on too small a sample.
    #[error("insufficient sample: needed {needed}, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    /// Two spectra passed to a comparison do not describe the same index set.
    #[error("mismatched spectra: {0}")]
    MismatchedSpectra(String),

    /// A statistic was requested on an empty cluster.
    #[error("empty cluster {ell}")]
    EmptyCluster { ell: u32 },

    /// File I/O failure while reading or writing tables.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A table being re-ingested did not parse.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
