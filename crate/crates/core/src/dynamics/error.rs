use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid potential: {0}")]
    InvalidSpec(String),
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepFailure { t: f64, h: f64 },
    #[error("seed offset {norm:e} exceeds seed radius {limit:e}")]
    OffsetTooLarge { norm: f64, limit: f64 },
    #[error("no homoclinic trajectory found")]
    NoneFound,
    #[error("exponential tail fit residual {residual:e} exceeds {limit:e}")]
    FitResidualTooLarge { residual: f64, limit: f64 },
    #[error("extrapolated limit {value} is not positive")]
    NonPositive { value: f64 },
    #[error("trajectory does not reach radius {radius:e} of the origin")]
    TailTooShort { radius: f64 },
    #[error("maslov indices supplied for {got} trajectories, expected {expected}")]
    MaslovCount { expected: usize, got: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T, E = DynamicsError> = std::result::Result<T, E>;
