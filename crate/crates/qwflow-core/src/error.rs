//! Error taxonomy shared by every module.
//!
//! Variants are grouped by how the CLI maps them to exit codes: configuration
//! and argument problems are usage errors, spectral/linear-algebra breakdowns
//! are numeric failures, and filesystem problems are I/O failures.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid model configuration (bad `N`, out-of-range marked vertex, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Invalid argument to an operation (bad sweep list, bad window, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A truncated-tails evolution was asked to step past its time horizon,
    /// where the truncation boundary would become causally visible.
    #[error("time horizon exceeded: step {step} with horizon {horizon}")]
    Horizon { step: usize, horizon: usize },

    /// A linear solve hit a singular system (only possible at the
    /// unperturbed limit, which admits no fixed point).
    #[error("singular solve: {0}")]
    SingularSolve(String),

    /// Eigenvalues collided within tolerance; the eigenprojection
    /// construction is ill-posed.
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    /// A least-squares fit was ill-conditioned or under-determined.
    #[error("fit error: {0}")]
    Fit(String),

    /// A result that must be real (or normalizable) failed its check.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Export was asked to write an empty series.
    #[error("empty series: nothing to export")]
    EmptySeries,

    /// Filesystem failure, annotated with the path involved.
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) | Error::EmptySeries => 2,
            Error::Horizon { .. }
            | Error::SingularSolve(_)
            | Error::DegenerateSpectrum(_)
            | Error::Fit(_)
            | Error::Numeric(_) => 3,
            Error::Io { .. } => 4,
        }
    }
}
