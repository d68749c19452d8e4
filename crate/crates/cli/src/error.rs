use thiserror::Error;
use transmutant::TransmutantError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Io(String),

    #[error(transparent)]
    Compute(#[from] TransmutantError),

    #[error("{failed} of {total} checks failed")]
    VerifyFailed {
        failed: usize,
        total: usize,
        report: String,
    },
}

impl CliError {
    /// 0 ok, 1 verification failure, 2 configuration, 3 convergence, 4 vanishing solution.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed { .. } => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Compute(TransmutantError::ConvergenceFailure { .. }) => 3,
            CliError::Compute(TransmutantError::VanishingSolution { .. }) => 4,
            CliError::Compute(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
