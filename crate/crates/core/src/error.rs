use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "power iteration did not converge after {iterations} iterations (best estimate {estimate})"
    )]
    PowerIterationStalled { estimate: f64, iterations: usize },

    /// The inner shrinkage problem of the generalized Huber function stopped
    /// at `max_iter` without reaching the requested residual.
    #[error("inner solver did not converge after {iterations} iterations (residual {residual:e})")]
    InnerNotConverged {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },

    #[error("singular least-squares system on a support of size {support}")]
    SingularSystem { support: usize },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_finite<T: crate::scalar::Scalar>(v: &[T]) -> Result<()> {
    if v.iter().all(|z| z.is_finite()) {
        Ok(())
    } else {
        Err(invalid("values", "non-finite entry"))
    }
}
