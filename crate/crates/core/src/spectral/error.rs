use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid quantization input: {0}")]
    InvalidInput(String),
    #[error("invariants do not satisfy the case relations: {0}")]
    CaseMismatch(String),
    #[error("found {found} roots but the winding number is {counted}")]
    CountMismatch { found: usize, counted: i64 },
    #[error("surrogate matrix is singular: z lies {distance:e} (in units of h/|ln h|) from a pseudo-resonance")]
    SingularMatrix { distance: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T, E = SpectralError> = std::result::Result<T, E>;
