use thiserror::Error;

pub type Result<T> = std::result::Result<T, ZenoError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZenoError {
    #[error("invalid detector model: {0}")]
    InvalidModel(String),

    #[error("tabulated F does not decay: |F| = {value:.3e} at x = {x}")]
    NonDecayingTail { x: f64, value: f64 },

    #[error("degenerate detector: width C = {0} must be positive")]
    DegenerateDetector(f64),

    #[error("unknown state: {0}")]
    Lookup(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid drive: {0}")]
    InvalidDrive(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature did not reach tolerance: estimate {estimate:.6e}, error {error:.3e}")]
    Integration { estimate: f64, error: f64 },

    #[error("outside the second-order regime: survival probability {0:.6e} < 0")]
    PerturbationValidity(f64),

    #[error("propagation lost unitarity: norm drift {0:.3e}")]
    NormDrift(f64),

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl ZenoError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        ZenoError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by bad input rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            ZenoError::InvalidModel(_)
                | ZenoError::NonDecayingTail { .. }
                | ZenoError::DegenerateDetector(_)
                | ZenoError::Lookup(_)
                | ZenoError::InvalidSystem(_)
                | ZenoError::InvalidSchedule(_)
                | ZenoError::InvalidDrive(_)
                | ZenoError::Unsupported(_)
                | ZenoError::Config { .. }
                | ZenoError::Io(_)
        )
    }
}

impl From<std::io::Error> for ZenoError {
    fn from(e: std::io::Error) -> Self {
        ZenoError::Io(e.to_string())
    }
}
