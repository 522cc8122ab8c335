//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the estimator, oracles and I/O helpers.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its domain (e.g. `mu <= -1`, `N > 20`, `h <= 0`).
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// The Gamma function was evaluated at a non-positive integer.
    #[error("gamma pole: x = {x} is within 1e-12 of a non-positive integer")]
    GammaPole {
        /// Offending argument.
        x: f64,
    },

    /// An estimation window does not lie on the signal's sample grid.
    #[error("window error: {0}")]
    WindowOutOfRange(String),

    /// Sample count does not match the kernel grid.
    #[error("sample mismatch: {0}")]
    SampleMismatch(String),

    /// Kernel construction produced a NaN or infinite entry.
    #[error("kernel table contains non-finite values (check parameters)")]
    NonFiniteKernel,

    /// The least-squares design is rank deficient after equilibration.
    #[error("rank-deficient design: {0}")]
    RankDeficient(String),

    /// SNR was requested on a signal without a recorded noise component.
    #[error("signal has no (nonzero) noise component")]
    MissingNoise,

    /// No noise amplitude attains the requested SNR.
    #[error("unattainable SNR target: {0}")]
    UnattainableTarget(String),

    /// Truncated series was requested with too few terms for the tail bound.
    #[error("insufficient series terms: {0}")]
    InsufficientTerms(String),

    /// A CSV file failed to parse.
    #[error("{path}:{line}: {msg}")]
    DataFormat {
        /// File being parsed.
        path: String,
        /// 1-based line number.
        line: usize,
        /// What went wrong.
        msg: String,
    },

    /// The two independent Riemann-Liouville oracles disagree.
    #[error("oracle disagreement at x = {x}, alpha = {alpha}: series = {series}, quadrature = {quad} (|diff| = {diff:e} > {tol:e})", diff = (series - quad).abs())]
    OracleDisagreement {
        /// Evaluation point.
        x: f64,
        /// Derivative order.
        alpha: f64,
        /// Truncated-series oracle value.
        series: f64,
        /// Singularity-removed quadrature oracle value.
        quad: f64,
        /// Agreement tolerance that was violated.
        tol: f64,
    },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
