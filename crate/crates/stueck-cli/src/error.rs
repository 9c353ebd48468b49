//! Error domain of the command-line layer and its mapping to exit codes:
//! 0 success, 2 validation error (bad config/arguments), 3 numerical failure
//! (non-finite results, infeasible inversions, I/O breakdown).

use stueck_core::CoreError;
use stueck_neutrino::NeutrinoError;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug)]
pub enum CliError {
    /// Inputs outside the documented domain; exit code 2.
    Validation(String),
    /// Runtime failure of the computation or its outputs; exit code 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidGrid(_) | CoreError::ShapeMismatch(_) | CoreError::InvalidParameter(_) => {
                CliError::Validation(e.to_string())
            }
            CoreError::Numerical(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<NeutrinoError> for CliError {
    fn from(e: NeutrinoError) -> Self {
        match e {
            NeutrinoError::InvalidParameter(_) => CliError::Validation(e.to_string()),
            NeutrinoError::Infeasible(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Numerical(format!("serialization: {e}"))
    }
}
