use thiserror::Error;

/// Failures raised by the numerical routines.
///
/// Precondition violations carry the name of the violated bound so that the
/// command-line front end can surface it verbatim.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid precision: {0}")]
    Precision(String),

    #[error("index {n} exceeds the context's max_index_hint {max}")]
    IndexBeyondHint { n: u64, max: u64 },

    #[error("{op}: precondition violated: {bound}")]
    Precondition { op: &'static str, bound: String },

    #[error("continued fraction: precision exhausted after {reached} certified quotients")]
    PrecisionExhausted { reached: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(op: &'static str, bound: impl Into<String>) -> Result<T> {
    Err(Error::Precondition {
        op,
        bound: bound.into(),
    })
}
