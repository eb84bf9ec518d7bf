use std::fmt;

use timf_core::TimfError;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    /// A run completed but a checked property failed.
    Acceptance(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Acceptance(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Acceptance(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<TimfError> for CliError {
    fn from(e: TimfError) -> Self {
        match e {
            TimfError::InvalidParams(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("i/o: {e}"))
    }
}
