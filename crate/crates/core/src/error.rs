use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("function `{name}` expects {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("domain error: {message} at point {point:?}")]
    Domain { message: String, point: Vec<f64> },

    #[error("metric is not positive definite at point {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },

    #[error("singular matrix: {what} at point {point:?}")]
    Singular { what: String, point: Vec<f64> },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("validation failed: {check} residual {residual:e} at point {point:?}")]
    Validation {
        check: String,
        residual: f64,
        point: Vec<f64>,
    },

    #[error("ambiguous eigenvalue clustering at point {point:?}: gap {gap:e}")]
    AmbiguousClustering { point: Vec<f64>, gap: f64 },

    #[error("rank jump: {what} has rank {found} at point {point:?}, expected {expected}")]
    RankJump {
        what: String,
        expected: usize,
        found: usize,
        point: Vec<f64>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code associated with this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::AmbiguousClustering { .. } => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Invalid(format!("json: {e}"))
    }
}
