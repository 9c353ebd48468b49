//! Error taxonomy: bad inputs are distinguished from data that is valid in
//! form but admits no physical solution, so callers can map them to distinct
//! exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NeutrinoError {
    /// A parameter violates its documented domain (NaN, wrong sign, …).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Well-formed inputs with no real solution (e.g. a negative squared
    /// off-diagonal when inverting the mass matrix from splittings).
    #[error("infeasible data: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, NeutrinoError>;
