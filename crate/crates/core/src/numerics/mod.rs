//! Special functions and complex-analysis utilities shared by the other modules.

mod complex;
mod contour;
mod error;
mod extrapolate;
mod gamma;
mod linalg;
mod newton;

pub use complex::{complex_pow, pow_with_log, principal_ln};
pub use contour::{count_zeros, count_zeros_refined, ContourOptions, ContourWindow};
pub use error::{NumericsError, Result};
pub use extrapolate::{limit_extrapolate, Extrapolated, MIN_CONTRACTION};
pub use gamma::{digamma, gamma_complex, recip_gamma, POLE_TOLERANCE};
pub use linalg::CMatrix;
pub use newton::{holomorphic_derivative, newton_root, newton_root_numeric, NewtonRoot, DEFAULT_MAX_ITER, DEFAULT_TOL};
