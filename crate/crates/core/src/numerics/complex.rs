use num_complex::Complex;

use super::error::{NumericsError, Result};
use crate::real::{c, Real};

/// Principal logarithm `ln|z| + i Arg z` with `Arg` in `(-pi, pi]`.
#[inline]
pub fn principal_ln<T: Real>(z: Complex<T>) -> Complex<T> {
    c(z.norm().ln(), z.im.atan2(z.re))
}

/// `base^exponent` on the principal branch of the logarithm.
pub fn complex_pow<T: Real>(base: Complex<T>, exponent: Complex<T>) -> Result<Complex<T>> {
    if base.re == T::zero() && base.im == T::zero() {
        if exponent.im == T::zero() && exponent.re > T::zero() {
            return Ok(c(T::zero(), T::zero()));
        }
        return Err(NumericsError::Domain("zero base with non-real-positive exponent".into()));
    }
    Ok(pow_with_log(principal_ln(base), exponent))
}

/// `exp(exponent * log_base)`; lets callers hoist the logarithm of a fixed base.
#[inline]
pub fn pow_with_log<T: Real>(log_base: Complex<T>, exponent: Complex<T>) -> Complex<T> {
    (exponent * log_base).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_exponent() {
        let v = complex_pow(c(0.0, 1.0), c(1.0, 0.0)).unwrap();
        assert!((v - c(0.0, 1.0)).norm() < 1e-16);
    }

    #[test]
    fn real_base_modulus() {
        let h = 0.1_f64;
        for &theta in &[-7.0, -0.3, 0.0, 2.5, 40.0] {
            let v = complex_pow(c(h, 0.0), c(0.5, theta)).unwrap();
            assert!((v.norm() - h.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn extended_precision_reference() {
        // (2i)^(-0.8), 40-digit reference
        let v = complex_pow(c(0.0, 2.0), c(-0.8, 0.0)).unwrap();
        let reference = c(0.177_483_656_552_315_02, -0.546_238_527_888_726_86);
        assert!((v - reference).norm() / reference.norm() < 1e-15);
    }

    #[test]
    fn zero_base() {
        assert!(complex_pow(c(0.0, 0.0), c(-1.0, 0.0)).is_err());
        assert!(complex_pow(c(0.0, 0.0), c(0.5, 0.1)).is_err());
        assert_eq!(complex_pow(c(0.0, 0.0), c(2.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn branch_of_negative_real_axis() {
        // Arg(-1) = pi, so (-1)^(1/2) = i
        let v = complex_pow(c(-1.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((v - c(0.0, 1.0)).norm() < 1e-15);
    }
}
