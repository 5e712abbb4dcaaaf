use std::process::ExitCode;

use reflectal_core::Error as CoreError;

/// Failure of a command, mapped onto the process exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("empty result: {0}")]
    Empty(String),

    #[error("unstable propagation: {0}")]
    Unstable(String),
}

impl CliError {
    pub const PRECONDITION: u8 = 2;
    pub const EMPTY: u8 = 3;
    pub const INSTABILITY: u8 = 4;

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => Self::PRECONDITION,
            CliError::Empty(_) => Self::EMPTY,
            CliError::Unstable(_) => Self::INSTABILITY,
            CliError::Core(e) => match e {
                CoreError::EmptyWindow(_)
                | CoreError::TopologyNotFound(_)
                | CoreError::DegenerateGeometry { .. }
                | CoreError::NonPositiveAlpha { .. } => Self::EMPTY,
                CoreError::Instability { .. } => Self::INSTABILITY,
                _ => Self::PRECONDITION,
            },
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }
}
