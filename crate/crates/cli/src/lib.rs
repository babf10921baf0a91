//! Command implementations behind the `optoneuro` binary.
//!
//! Exit codes: 0 success, 1 runtime failure or failed check, 2 usage error,
//! 3 invalid configuration.

pub mod calc;
pub mod commands;
pub mod dataset;
pub mod figures;
pub mod scenario;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Validation(m) => write!(f, "invalid configuration: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<optoneuro::Error> for CliError {
    fn from(e: optoneuro::Error) -> Self {
        use optoneuro::Error as E;
        match e {
            E::Config(_) | E::Domain { .. } | E::Dimension { .. } | E::Parse { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}
