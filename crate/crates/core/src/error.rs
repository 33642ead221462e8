use thiserror::Error;

/// Errors raised by the toolkit. The pipeline wraps failures in
/// [`Error::Stage`] so the CLI can report which stage failed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular evaluation: {0}")]
    Singularity(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("matrix kind mismatch: expected {expected}, got {found}")]
    KindMismatch { expected: String, found: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("linear solve failed: {0}")]
    Singular(String),

    #[error("no convergence after {iterations} iterations: {what}")]
    Convergence { what: String, iterations: usize },

    /// The discrepancy equation has no positive root: the noise level is at
    /// least as large as the attainable residual.
    #[error("noise exceeds signal: discrepancy equation has no sign change")]
    NoiseExceedsSignal,

    #[error("unknown preset: {0}")]
    UnknownPreset(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
