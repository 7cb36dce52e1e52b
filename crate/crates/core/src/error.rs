use thiserror::Error;

/// Errors raised by grid construction, time stepping and the stability checkers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("numerical blow-up at step {step}: {detail}")]
    NumericalBlowup { step: usize, detail: String },

    #[error("steady-state integration failed at x = {x}: {detail}")]
    SteadyStateFailure { x: f64, detail: String },

    #[error("no decay certificate: eta = {eta} is not positive")]
    NoCertificate { eta: f64 },

    #[error("singular boundary gain: {0}")]
    SingularGain(String),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
}

pub type Result<T> = std::result::Result<T, Error>;
