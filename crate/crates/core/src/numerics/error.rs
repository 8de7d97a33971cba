use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("argument {re} + {im}i is at a pole of the Gamma function")]
    Pole { re: f64, im: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Newton iteration did not converge after {iterations} iterations (|f| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("derivative vanished at iteration {iteration}")]
    DerivativeVanished { iteration: usize },
    #[error("function value {min_modulus:e} on the contour is below the threshold {threshold:e}")]
    ContourTooClose { min_modulus: f64, threshold: f64 },
    #[error("phase jump {max_jump:.3} rad between adjacent contour samples exceeds pi/2; refine sampling")]
    Resolution { max_jump: f64 },
    #[error("sequence is not converging: Cauchy differences {differences:?}")]
    NotConverging { differences: Vec<f64> },
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("non-finite value produced: {0}")]
    NonFinite(&'static str),
    #[error("matrix is singular to working precision")]
    Singular,
}

pub type Result<T, E = NumericsError> = std::result::Result<T, E>;
