use std::fmt;

use decoupler_core::Error;

/// Failure of a run, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent input; exit code 2.
    Validation(String),
    /// The numerics could not produce a value; exit code 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

/// Attaches the config field a library error originated from.
pub fn at(field: &'static str) -> impl Fn(Error) -> CliError {
    move |e| {
        let msg = format!("{field}: {e}");
        if e.is_numerical() {
            CliError::Numerical(msg)
        } else {
            CliError::Validation(msg)
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
