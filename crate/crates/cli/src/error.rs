use resonance_core::dynamics::DynamicsError;
use resonance_core::spectral::SpectralError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{stage}: {message}")]
    Numerical { stage: String, message: String },
    #[error("dynamics: no homoclinics")]
    NoHomoclinics,
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical { .. } | CliError::NoHomoclinics => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn from_dynamics(stage: &str, e: DynamicsError) -> Self {
        match e {
            DynamicsError::NoneFound => CliError::NoHomoclinics,
            DynamicsError::InvalidSpec(_) | DynamicsError::MaslovCount { .. } | DynamicsError::OffsetTooLarge { .. } => {
                CliError::Validation(format!("{stage}: {e}"))
            }
            e => CliError::Numerical { stage: format!("dynamics/{stage}"), message: e.to_string() },
        }
    }

    pub fn from_spectral(stage: &str, e: SpectralError) -> Self {
        match e {
            SpectralError::InvalidInput(_) | SpectralError::CaseMismatch(_) => CliError::Validation(format!("{stage}: {e}")),
            e => CliError::Numerical { stage: format!("spectral/{stage}"), message: e.to_string() },
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

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
