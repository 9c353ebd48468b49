//! Error type shared by the grid, evolution and diagnostics modules.

use thiserror::Error;

/// Errors produced by grid construction, operator application and evolution.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Grid geometry is unusable (bad extents, unsupported dimension, ...).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Two objects that must live on the same grid/signature do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A scalar parameter is out of its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The computation produced non-finite values or failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
