//! Error type shared by all engine operations.

use alloc::string::String;

/// Errors produced by mixing operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    /// Tensor or mask dimensions do not line up.
    #[error("shape error: {0}")]
    Shape(String),
    /// A numeric or structural parameter is out of range.
    #[error("parameter error: {0}")]
    Param(String),
    /// A policy configuration is invalid.
    #[error("config error: {0}")]
    Config(String),
    /// An operation received an empty batch, mask, or prediction list.
    #[error("empty input: {0}")]
    Empty(String),
}

pub type Result<T> = core::result::Result<T, CoreError>;
