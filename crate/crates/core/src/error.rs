use thiserror::Error;

/// Crate-wide error type. Variants map onto the failure modes of the
/// numerical operations rather than onto modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unsupported sampling: {0}")]
    UnsupportedSampling(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no closed form for {0}")]
    NoClosedForm(String),

    #[error("resolution budget exceeded: requested lambda {requested}, max admissible {max_admissible}")]
    Resolution { requested: f64, max_admissible: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("potential model lacks derivative order {order} (max declared {max})")]
    MissingDerivative { order: usize, max: usize },

    #[error("frequency coverage too small for reconstruction: {0}")]
    Bandwidth(String),

    #[error("trajectory escape: {0}")]
    TrajectoryEscape(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
