//! Process exit codes and the error type of the front-end.

use std::path::PathBuf;

use thiserror::Error;

/// Exit status of every subcommand. The numeric values are stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    /// Solve converged, every verified property held, every reproduced row matched.
    Ok = 0,
    /// Bad command-line usage.
    Usage = 2,
    /// The problem file or a parameter failed to parse or validate.
    Validation = 3,
    /// The solve stopped on `max-iter` or `step-tol` without reaching the residual tolerance.
    NotConverged = 4,
    /// The solve stopped on an order violation.
    Monotonicity = 5,
    /// At least one verified property failed.
    VerifyFailed = 6,
    /// At least one reproduced value missed its tolerance.
    ReproduceMismatch = 7,
    /// A file could not be read or written.
    Io = 8,
    /// A numerical failure during a computation, such as a non-finite map value.
    Numerical = 9,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Numerical(#[from] elcone::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::Usage,
            CliError::Validation(_) => ExitCode::Validation,
            CliError::Io { .. } => ExitCode::Io,
            CliError::Numerical(_) => ExitCode::Numerical,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// A validation error from the core library, prefixed with the field it
    /// concerns.
    pub fn invalid(field: &str, err: elcone::Error) -> Self {
        CliError::Validation(format!("{field}: {err}"))
    }
}
