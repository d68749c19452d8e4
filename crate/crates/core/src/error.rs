use thiserror::Error;

pub type Result<T, E = TransmutantError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TransmutantError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {x} lies outside [-{half_width}, {half_width}]")]
    OutOfDomain { x: f64, half_width: f64 },

    #[error("successive approximation did not converge in {iterations} iterations (last update {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// The chosen solution `f` gets too close to zero; every Darboux formula divides by it.
    #[error("solution vanishes near x = {x}: |f| = {magnitude:e}")]
    VanishingSolution { x: f64, magnitude: f64 },

    #[error("inconsistent input: {what} (defect {defect:e})")]
    InconsistentInput { what: String, defect: f64 },
}

impl TransmutantError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        TransmutantError::InvalidArgument(msg.into())
    }
}
