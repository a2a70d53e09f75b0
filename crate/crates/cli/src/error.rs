use std::fmt;

use falc::FalcError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config, inputs or output paths.
    Config(String),
    /// The solver itself failed.
    Solver(FalcError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Solver(_) => 3,
        }
    }

    pub(crate) fn io(what: &str, e: impl fmt::Display) -> Self {
        CliError::Config(format!("{what}: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Solver(e) => write!(f, "solver error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}
