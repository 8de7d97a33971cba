use super::error::{NumericsError, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated<T> {
    pub value: T,
    /// Last Cauchy difference of the accelerated sequence.
    pub error: T,
}

/// Minimum contraction of successive Cauchy differences.
pub const MIN_CONTRACTION: f64 = 1.5;

/// Limit of a sequence sampled on its approach to `|s| -> infinity`.
///
/// Samples must be ordered by increasing `|s|`. The raw differences must contract
/// by at least [`MIN_CONTRACTION`] per step (differences at rounding level are
/// treated as converged); the limit is then accelerated with Aitken's delta-squared
/// process, which is exact for a single decaying exponential on a uniform grid.
pub fn limit_extrapolate<T: Real>(samples: &[(T, T)]) -> Result<Extrapolated<T>> {
    if samples.len() < 4 {
        return Err(NumericsError::InsufficientSamples { needed: 4, got: samples.len() });
    }
    if samples.iter().any(|(s, v)| !s.is_finite() || !v.is_finite()) {
        return Err(NumericsError::NonFinite("extrapolation sample"));
    }
    let values: Vec<T> = samples.iter().map(|&(_, v)| v).collect();
    let scale = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let floor = T::lit(64.0) * T::epsilon() * scale.max(T::min_positive_value());

    let diffs: Vec<T> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let contraction = T::lit(MIN_CONTRACTION);
    let converging = diffs
        .windows(2)
        .all(|d| d[1] <= floor || d[1] * contraction <= d[0]);
    if !converging {
        return Err(NumericsError::NotConverging {
            differences: diffs.iter().map(|d| d.to_f64().unwrap_or(f64::NAN)).collect(),
        });
    }

    let accelerated: Vec<T> = values
        .windows(3)
        .map(|w| {
            let d1 = w[1] - w[0];
            let d2 = w[2] - w[1];
            let denom = d2 - d1;
            if denom.abs() <= floor || d2.abs() <= floor {
                w[2]
            } else {
                w[2] - d2 * d2 / denom
            }
        })
        .collect();
    let n = accelerated.len();
    let value = accelerated[n - 1];
    let error = (accelerated[n - 1] - accelerated[n - 2]).abs().max(floor);
    Ok(Extrapolated { value, error })
}
