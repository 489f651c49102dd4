//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by the library.
///
/// Each variant maps onto one process exit class in the command line tool.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Parameters outside the documented range, with the violated bound.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A structurally malformed input such as a zero weight or a non-oper connection.
    #[error("domain error: {0}")]
    Domain(String),
    /// A computed object contradicts an asserted statement.
    #[error("theorem violation in {clause}: {detail}")]
    TheoremViolation { clause: String, detail: String },
    /// Two independent computations that must agree did not.
    #[error("internal consistency failure: {0}")]
    Internal(String),
    /// Truncation order too small for the requested check.
    #[error("precision exhausted: need order {required}, have {available}")]
    Precision { required: i64, available: i64 },
    /// A block of the fiber solver had a singular linear system.
    #[error("singular system in block {block}: {detail}")]
    Singular { block: usize, detail: String },
    /// The request is well formed but outside the supported locus.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for a theorem violation.
    pub fn violation(clause: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::TheoremViolation { clause: clause.into(), detail: detail.into() }
    }
}
