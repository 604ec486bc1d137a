//! Crate error type.

use thiserror::Error;

/// Errors produced by validation of inputs and configurations.
///
/// Simulation outcomes that are merely unfavourable (retry exhaustion,
/// decode failure) are reported through result structs, not through this
/// type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar parameter violated its domain constraint.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: String,
    },
    /// Two sequences that must agree in length did not.
    #[error("length mismatch: {context} (expected {expected}, got {got})")]
    LengthMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    /// A code or protocol configuration is internally inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
