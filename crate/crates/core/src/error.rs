//! Error taxonomy shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes of the operands do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Input lies outside the documented domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A search exhausted its budget without reaching the required quality.
    #[error("search failed: {context} (best defect {best_defect:e})")]
    SearchFailed { context: String, best_defect: f64 },

    /// A certified computation contradicts a proved statement. Seeing this
    /// means a bug in the caller's data or in this crate, not new math.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    /// A swept lemma reported a counterexample point.
    #[error("lemma violation: {0}")]
    LemmaViolation(String),

    /// Malformed textual input.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
