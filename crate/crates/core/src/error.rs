use thiserror::Error;

/// Largest series order accepted by the solver.
pub const MAX_ORDER: usize = 30;

#[derive(Debug, Error)]
pub enum Error {
    #[error("N must be in [0, {MAX_ORDER}], got {0}")]
    OrderOutOfRange(i64),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("invalid model at {path}: {message}")]
    Invariant { path: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed Laplace image: {0}")]
    MalformedImage(String),

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("non-finite value at {0}")]
    NonFinite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn invariant(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invariant {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::StepUnderflow { .. } | Error::NonFinite(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
