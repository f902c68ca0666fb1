use bigraded_toda::flows::FlowError;
use bigraded_toda::hirota_check::HirotaCheckError;
use bigraded_toda::lattice_ops::LatticeError;
use bigraded_toda::miura::MiuraError;
use bigraded_toda::tau_engine::TauError;
use std::fmt;
use std::process::ExitCode;

/// A command outcome other than success, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// A check ran and did not pass (exit 1).
    Failed(String),
    /// Invalid parameters or input data (exit 2).
    Usage(String),
    /// Unreadable, unwritable or unparsable files (exit 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        })
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Failed(m) => write!(f, "check failed: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<TauError> for CliError {
    fn from(e: TauError) -> Self {
        match e {
            TauError::Parse { .. } | TauError::TauZeroNotOne | TauError::ForeignVariables => CliError::Io(e.to_string()),
            TauError::LaxMismatch { .. } | TauError::BandViolation { .. } => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<HirotaCheckError> for CliError {
    fn from(e: HirotaCheckError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::MonitorBreach { .. } | FlowError::NonFinite { .. } => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<MiuraError> for CliError {
    fn from(e: MiuraError) -> Self {
        match e {
            MiuraError::Flow(f) => f.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}
