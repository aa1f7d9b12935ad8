use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exponent constraint violated: {0}")]
    ExponentConstraint(String),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("space too large: {n} points exceeds the {max} point limit")]
    SizeOverflow { n: usize, max: usize },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("heat kernel negativity {value:.3e} at t={t:.3e} exceeds the roundoff threshold {threshold:.3e}")]
    KernelNegative { value: f64, t: f64, threshold: f64 },

    #[error("quadrature did not converge: achieved error estimate {achieved:.3e}, wanted {wanted:.3e}")]
    QuadratureNonConvergence { achieved: f64, wanted: f64 },

    #[error("series truncation failure: {0}")]
    TruncationFailure(String),

    #[error("numeric inverse failed: {0}")]
    InverseOutOfRange(String),

    #[error("no admissible candidate set: {0}")]
    NoAdmissibleCandidate(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
