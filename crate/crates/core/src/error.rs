use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: domain is {expected}-dimensional, point has {got} coordinates")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("empty support: {{beta < {threshold}}} has no exterior points")]
    EmptySupport { threshold: f64 },

    #[error("divergent integral: decay rate {decay} does not exceed dimension {dim}")]
    Divergent { decay: f64, dim: usize },

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (partial value {partial:e}, error estimate {error:e})"
    )]
    NonConvergence {
        partial: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("integrand returned a non-finite value at {at}")]
    NonFinite { at: f64 },

    #[error("rejection sampling failed after {attempts} attempts (exit point {point:?})")]
    SamplingFailure { attempts: usize, point: Vec<f64> },

    #[error("particle {particle}, step {step}: {source}")]
    Path {
        particle: u64,
        step: usize,
        source: Box<Error>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable tag, used in per-row status columns.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Geometry(_) => "geometry",
            Error::EmptySupport { .. } => "empty_support",
            Error::Divergent { .. } => "divergent",
            Error::NonConvergence { .. } => "nonconvergence",
            Error::NonFinite { .. } => "non_finite",
            Error::SamplingFailure { .. } => "sampling_failure",
            Error::Path { source, .. } => source.kind(),
            Error::InvalidParameter(_) => "invalid_parameter",
        }
    }
}
