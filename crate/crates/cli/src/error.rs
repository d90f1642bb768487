use std::fmt;

/// Harness errors, grouped by the process exit code they map to:
/// configuration problems exit 2, data problems 3, numeric failures 4.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
            CliError::Numeric(msg) => write!(f, "numeric error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qcl_core::Error> for CliError {
    fn from(e: qcl_core::Error) -> Self {
        use qcl_core::Error as E;
        match &e {
            E::Format { .. } | E::Io(_) | E::DatasetInvariant(_) | E::Checkpoint(_) => {
                CliError::Data(e.to_string())
            }
            E::NotHermitian { .. }
            | E::EigenConvergence
            | E::Synthesis { .. }
            | E::QpConvergence { .. }
            | E::NonFinite { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
