use std::process::ExitCode;

use caustica::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("oracle failure: {0}")]
    Oracle(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Self::Config(_) => 2,
            Self::Internal(_) => 3,
            Self::Oracle(_) => 4,
        })
    }

    /// Classifies a library error raised while processing `context`.
    pub fn from_lib(err: Error, context: &str) -> Self {
        let msg = format!("{context}: {err}");
        match err {
            Error::InvalidRotation { .. }
            | Error::Deformation(_)
            | Error::DegreeMismatch { .. }
            | Error::Unsupported(_)
            | Error::Json(_)
            | Error::Io(_) => Self::Config(msg),
            Error::NotConvex { .. }
            | Error::LineMissesTable { .. }
            | Error::NoConvergence { .. }
            | Error::NotAGraph { .. }
            | Error::Fit(_) => Self::Oracle(msg),
            _ => Self::Internal(msg),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        Self::from_lib(err, "input")
    }
}
