//! Crate-wide error type.

/// Errors reported by the library.
///
/// The CLI maps these onto its exit-code contract: parse errors exit 2,
/// unsupported inputs (violated preconditions, inapplicable algorithms)
/// exit 3, and numeric or internal-invariant failures exit 4.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input text; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A precondition does not hold for this input (wrong graph class,
    /// parameter out of range, instance over a size cap).
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// A numeric routine failed to deliver its stated tolerance.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// An internal invariant that must hold by construction was violated.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
