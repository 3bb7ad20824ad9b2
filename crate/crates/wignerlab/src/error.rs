use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation
    /// (non-finite argument, evaluation point off the upper half-plane, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid argument (index out of range, empty input,
    /// unordered interval, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Invalid distribution or campaign configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller-side contract was violated (non-symmetric matrix where a
    /// symmetric one is required, missing eigenvectors, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Numeric failure: degenerate pivot, non-convergence, residual above
    /// tolerance.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
