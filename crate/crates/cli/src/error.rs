use std::fmt;
use std::io;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent configuration, or unwritable
    /// output. Exit code 1.
    Config(String),
    /// A numerical check failed or an input violated a matrix invariant.
    /// Exit code 2.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<entwit::Error> for CliError {
    fn from(e: entwit::Error) -> Self {
        use entwit::Error as E;
        match e {
            E::NotHermitian { .. }
            | E::NotUnitary { .. }
            | E::InvalidDensity(_)
            | E::EigenNonConvergence { .. }
            | E::UndefinedFunction { .. }
            | E::NonCommutingSchedule { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
