use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A requested state or operation does not fit in the truncated basis.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Coherent-state truncation guard tripped; carries the norm deficit
    /// that the truncated, renormalized state would silently absorb.
    #[error("truncation guard: |alpha|^2 = {mean_photons} exceeds cutoff/2 = {limit} (norm deficit {deficit:.3e})")]
    TruncationGuard {
        mean_photons: f64,
        limit: f64,
        deficit: f64,
    },

    /// Two objects built over different Fock bases were combined.
    #[error("basis mismatch: cutoff {left} vs {right}")]
    BasisMismatch { left: usize, right: usize },

    /// Pipeline must contain exactly one retarder stage.
    #[error("pipeline shape error: {0}")]
    PipelineShape(String),

    /// Density-matrix invariant violated beyond tolerance.
    #[error("state invariant violated: {0}")]
    StateInvariant(String),

    /// Quadrature grid order too low for the requested sector.
    #[error("grid order {order} too low, need at least {required}")]
    GridOrder { order: usize, required: usize },

    /// Degree of polarization is undefined for the vacuum.
    #[error("degree of polarization undefined: <S0> = 0")]
    UndefinedDop,

    /// Polynomial root finder failed to converge.
    #[error("root finder did not converge: {0}")]
    RootFinding(String),

    /// POVM outcome probability underflowed while its derivative did not.
    #[error("probability underflow with nonvanishing derivative at outcome {outcome}: p = {p:.3e}, dp = {dp:.3e}")]
    ProbabilitySingularity { outcome: usize, p: f64, dp: f64 },

    /// QFI is zero, so the Cramer-Rao bound is unbounded.
    #[error("zero Fisher information: estimator variance is unbounded")]
    UnboundedVariance,

    /// Dense linear-algebra routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerics(String),

    /// Invalid argument (selection rules, parameter ranges, malformed files).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Experiment configuration error.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
