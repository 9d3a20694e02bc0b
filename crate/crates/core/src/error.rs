use thiserror::Error;

/// Errors raised by the walkscale algorithms.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input text.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A parameter lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An instance exceeds the size an exact routine supports.
    #[error("size error: {0}")]
    Size(String),

    /// An exact count does not fit in 128 bits.
    #[error("overflow while computing {0}")]
    Overflow(&'static str),

    /// A node index is not part of the graph.
    #[error("node index {index} out of range for graph on {n} nodes")]
    OutOfRange { index: usize, n: usize },

    /// A quantity is undefined for the supplied data.
    #[error("undefined: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
