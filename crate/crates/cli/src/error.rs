use std::fmt;

use twpa::TwpaError;

/// Exit status 2 for bad input or configuration, 1 for numerical failure.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<TwpaError> for CliError {
    fn from(e: TwpaError) -> Self {
        // Domain errors reach the CLI only through user-supplied values.
        if e.is_input_error() || matches!(e, TwpaError::Domain(_)) {
            CliError::Input(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}
