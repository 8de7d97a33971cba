//! Gamma function on the complex plane.
//!
//! Lanczos approximation with `g = 7` and nine coefficients, continued to
//! `Re s < 1/2` through the reflection formula.

use num_complex::Complex;

use super::error::{NumericsError, Result};
use crate::real::{cr, Real};

const LANCZOS_G: f64 = 7.0;

const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Distance to the nearest non-positive integer under which `s` counts as a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

fn near_pole<T: Real>(s: Complex<T>) -> bool {
    let tol = T::lit(POLE_TOLERANCE);
    if s.im.abs() >= tol || s.re > tol {
        return false;
    }
    (s.re - s.re.round()).abs() < tol
}

/// Lanczos sum and the shifted variable `t = s + g - 1/2` for `Re s >= 1/2`.
fn lanczos_parts<T: Real>(s: Complex<T>) -> (Complex<T>, Complex<T>) {
    let z = s - T::one();
    let mut sum = cr(T::lit(LANCZOS_COEFFS[0]));
    for (k, &p) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += cr(T::lit(p)) / (z + T::from_usize_lossy(k));
    }
    let t = z + T::lit(LANCZOS_G + 0.5);
    (sum, t)
}

fn gamma_right<T: Real>(s: Complex<T>) -> Complex<T> {
    let (sum, t) = lanczos_parts(s);
    let z = s - T::one();
    let half = T::lit(0.5);
    let sqrt_2pi = (T::PI() + T::PI()).sqrt();
    // t^(z+1/2) e^{-t} combined in one exponential to avoid intermediate overflow.
    ((z + half) * t.ln() - t).exp() * sum * sqrt_2pi
}

/// Gamma function of a complex argument.
pub fn gamma_complex<T: Real>(s: Complex<T>) -> Result<Complex<T>> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(NumericsError::NonFinite("gamma argument"));
    }
    if near_pole(s) {
        return Err(NumericsError::Pole {
            re: s.re.to_f64().unwrap_or(f64::NAN),
            im: s.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    let half = T::lit(0.5);
    let value = if s.re < half {
        let pi = T::PI();
        cr(pi) / ((s * pi).sin() * gamma_right(Complex::new(T::one(), T::zero()) - s))
    } else {
        gamma_right(s)
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(NumericsError::NonFinite("gamma value"))
    }
}

/// Reciprocal Gamma function, entire in `s`; exactly zero at the poles of Gamma.
pub fn recip_gamma<T: Real>(s: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    if s.re < half {
        let pi = T::PI();
        (s * pi).sin() * gamma_right(Complex::new(T::one(), T::zero()) - s) / pi
    } else {
        cr(T::one()) / gamma_right(s)
    }
}

/// Logarithmic derivative of Gamma, obtained by differentiating the Lanczos form.
pub fn digamma<T: Real>(s: Complex<T>) -> Result<Complex<T>> {
    if near_pole(s) {
        return Err(NumericsError::Pole {
            re: s.re.to_f64().unwrap_or(f64::NAN),
            im: s.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    let half = T::lit(0.5);
    if s.re < half {
        // psi(s) = psi(1 - s) - pi cot(pi s)
        let pi = T::PI();
        let one = Complex::new(T::one(), T::zero());
        let arg = s * pi;
        return Ok(digamma_right(one - s) - arg.cos() / arg.sin() * pi);
    }
    Ok(digamma_right(s))
}

fn digamma_right<T: Real>(s: Complex<T>) -> Complex<T> {
    let z = s - T::one();
    let mut sum = cr(T::lit(LANCZOS_COEFFS[0]));
    let mut dsum = Complex::new(T::zero(), T::zero());
    for (k, &p) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        let d = z + T::from_usize_lossy(k);
        let p = cr(T::lit(p));
        sum += p / d;
        dsum -= p / (d * d);
    }
    let t = z + T::lit(LANCZOS_G + 0.5);
    t.ln() + (z + T::lit(0.5)) / t - T::one() + dsum / sum
}
