use num_complex::Complex;

use super::error::{NumericsError, Result};
use crate::real::Real;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonRoot<T> {
    pub root: Complex<T>,
    pub residual: T,
    pub iterations: usize,
}

/// Newton's method for a holomorphic `f`; `f_df` returns `(f(z), f'(z))`.
///
/// Converges when `|f(z)| < tol`. Steps are damped by halving whenever a full
/// step increases `|f|`, which keeps seeds slightly outside the basin usable.
pub fn newton_root<T, F>(mut f_df: F, seed: Complex<T>, tol: T, max_iter: usize) -> Result<NewtonRoot<T>>
where
    T: Real,
    F: FnMut(Complex<T>) -> Result<(Complex<T>, Complex<T>)>,
{
    if !(tol > T::zero()) {
        return Err(NumericsError::Domain("tolerance must be positive".into()));
    }
    let tiny = T::min_positive_value().max(T::lit(1e-300));
    let mut z = seed;
    let (mut fz, mut dfz) = f_df(z)?;
    for iteration in 0..=max_iter {
        let residual = fz.norm();
        if !residual.is_finite() {
            return Err(NumericsError::NonFinite("Newton residual"));
        }
        if residual < tol {
            return Ok(NewtonRoot { root: z, residual, iterations: iteration });
        }
        if iteration == max_iter {
            break;
        }
        if dfz.norm() < tiny {
            return Err(NumericsError::DerivativeVanished { iteration });
        }
        let step = fz / dfz;
        let mut scale = T::one();
        let mut accepted = None;
        for _ in 0..8 {
            let trial = z - step * scale;
            match f_df(trial) {
                Ok((ft, dft)) if ft.norm().is_finite() && ft.norm() < residual => {
                    accepted = Some((trial, ft, dft));
                    break;
                }
                _ => scale = scale * T::lit(0.5),
            }
        }
        let (zn, fzn, dfzn) = match accepted {
            Some(v) => v,
            None => {
                // No descent along the Newton direction; take the full step and let
                // the iteration limit decide.
                let trial = z - step;
                let (ft, dft) = f_df(trial)?;
                (trial, ft, dft)
            }
        };
        z = zn;
        fz = fzn;
        dfz = dfzn;
    }
    Err(NumericsError::NoConvergence { iterations: max_iter, residual: fz.norm().to_f64().unwrap_or(f64::NAN) })
}

/// Derivative of a holomorphic function from four points on a circle of radius `step`.
///
/// Averages `f(z + w^k r) w^{-k}` over the fourth roots of unity; truncation error is
/// `O(r^4)`.
pub fn holomorphic_derivative<T, F>(f: &mut F, z: Complex<T>, step: T) -> Result<Complex<T>>
where
    T: Real,
    F: FnMut(Complex<T>) -> Result<Complex<T>>,
{
    let i = Complex::new(T::zero(), T::one());
    let r = Complex::new(step, T::zero());
    let fp = f(z + r)?;
    let fm = f(z - r)?;
    let fip = f(z + i * r)?;
    let fim = f(z - i * r)?;
    Ok((fp - fm - i * (fip - fim)) / (r * T::lit(4.0)))
}

/// Newton's method when only `f` is available; the derivative is taken with
/// [`holomorphic_derivative`] at a step proportional to `derivative_step`.
pub fn newton_root_numeric<T, F>(
    mut f: F,
    seed: Complex<T>,
    tol: T,
    max_iter: usize,
    derivative_step: T,
) -> Result<NewtonRoot<T>>
where
    T: Real,
    F: FnMut(Complex<T>) -> Result<Complex<T>>,
{
    newton_root(
        |z| {
            let v = f(z)?;
            let d = holomorphic_derivative(&mut f, z, derivative_step)?;
            Ok((v, d))
        },
        seed,
        tol,
        max_iter,
    )
}
