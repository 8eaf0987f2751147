use std::fmt;

use troppca_core::Error as CoreError;

use crate::newick::ParseError;

/// Process exit status for each failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Usage = 1,
    Parse = 2,
    Numeric = 3,
}

#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Io { path: String, source: std::io::Error },
    Parse { path: String, errors: Vec<ParseError> },
    /// Well-formed input that violates a data requirement.
    Input(String),
    Numeric(String),
}

impl AppError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            AppError::Usage(_) | AppError::Io { .. } => ExitCode::Usage,
            AppError::Parse { .. } | AppError::Input(_) => ExitCode::Parse,
            AppError::Numeric(_) => ExitCode::Numeric,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(m) => write!(f, "usage error: {m}"),
            AppError::Io { path, source } => write!(f, "{path}: {source}"),
            AppError::Parse { path, errors } => {
                write!(f, "{path}: {} parse error(s)", errors.len())?;
                for e in errors {
                    write!(f, "\n  {e}")?;
                }
                Ok(())
            }
            AppError::Input(m) => write!(f, "invalid input: {m}"),
            AppError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for AppError {}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidConfig(_) | CoreError::SampleTooSmall { .. } => AppError::Usage(e.to_string()),
            CoreError::DimensionMismatch { .. }
            | CoreError::TooFewCoordinates(_)
            | CoreError::NotPairIndexed { .. }
            | CoreError::NotUltrametric(..)
            | CoreError::LeafSetMismatch(..)
            | CoreError::NotEquidistant { .. }
            | CoreError::InvalidTree(_)
            | CoreError::Empty => AppError::Input(e.to_string()),
            CoreError::NonFinite { .. }
            | CoreError::OutsidePolytope
            | CoreError::TooLarge(_)
            | CoreError::Infeasible(_)
            | CoreError::NotFermatWeber { .. } => AppError::Numeric(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for AppError {
    fn from(e: serde_json::Error) -> Self {
        AppError::Input(format!("JSON: {e}"))
    }
}

pub type AppResult<T> = Result<T, AppError>;
