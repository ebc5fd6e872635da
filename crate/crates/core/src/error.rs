use crate::complex::Vertex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the library.
///
/// The variants are grouped so that front ends can map them onto distinct
/// exit codes: parsing, validation, hypothesis violations and numerical
/// cross-check failures.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {0} is not part of the complex")]
    UnknownVertex(Vertex),

    #[error("complex is disconnected; rooted classes require a connected complex")]
    Disconnected,

    #[error("complex has no vertices")]
    Empty,

    #[error("vertex degree {found} exceeds the bound D = {bound}")]
    DegreeBound { found: usize, bound: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input too large: {0}")]
    TooLarge(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("numerical cross-check failed: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
