use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::error::{NumericsError, Result};
use crate::real::{c, Real};

/// Axis-aligned rectangle in the complex plane.
///
/// Spans `Re z` in `center.re ± half_width_re` and `Im z` in
/// `[center.im - half_width_im_low, center.im + half_width_im_high]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourWindow<T> {
    pub center: Complex<T>,
    pub half_width_re: T,
    pub half_width_im_low: T,
    pub half_width_im_high: T,
}

impl<T: Real> ContourWindow<T> {
    pub fn new(center: Complex<T>, half_width_re: T, half_width_im_low: T, half_width_im_high: T) -> Result<Self> {
        let positive = |v: T| v > T::zero() && v.is_finite();
        if !(positive(half_width_re) && positive(half_width_im_low) && positive(half_width_im_high)) {
            return Err(NumericsError::Domain("contour half-widths must be positive".into()));
        }
        Ok(Self { center, half_width_re, half_width_im_low, half_width_im_high })
    }

    /// Window from explicit edges.
    pub fn from_bounds(re_min: T, re_max: T, im_min: T, im_max: T) -> Result<Self> {
        let two = T::lit(2.0);
        let center_re = (re_min + re_max) / two;
        let center_im = (im_min + im_max) / two;
        Self::new(c(center_re, center_im), (re_max - re_min) / two, center_im - im_min, im_max - center_im)
    }

    pub fn re_min(&self) -> T {
        self.center.re - self.half_width_re
    }
    pub fn re_max(&self) -> T {
        self.center.re + self.half_width_re
    }
    pub fn im_min(&self) -> T {
        self.center.im - self.half_width_im_low
    }
    pub fn im_max(&self) -> T {
        self.center.im + self.half_width_im_high
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        z.re >= self.re_min() && z.re <= self.re_max() && z.im >= self.im_min() && z.im <= self.im_max()
    }

    /// Distance from `z` to the rectangle's boundary (zero on the boundary).
    pub fn boundary_distance(&self, z: Complex<T>) -> T {
        let dx_in = (z.re - self.re_min()).min(self.re_max() - z.re);
        let dy_in = (z.im - self.im_min()).min(self.im_max() - z.im);
        if self.contains(z) {
            dx_in.min(dy_in)
        } else {
            let dx = (self.re_min() - z.re).max(z.re - self.re_max()).max(T::zero());
            let dy = (self.im_min() - z.im).max(z.im - self.im_max()).max(T::zero());
            (dx * dx + dy * dy).sqrt()
        }
    }

    /// Counter-clockwise corners starting at the lower-left.
    fn corners(&self) -> [Complex<T>; 4] {
        [
            c(self.re_min(), self.im_min()),
            c(self.re_max(), self.im_min()),
            c(self.re_max(), self.im_max()),
            c(self.re_min(), self.im_max()),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourOptions<T> {
    pub samples_per_side: usize,
    /// Smallest admissible `|f|` on the sampled boundary.
    pub threshold: T,
}

impl<T: Real> Default for ContourOptions<T> {
    fn default() -> Self {
        Self { samples_per_side: 256, threshold: T::lit(1e-10) }
    }
}

/// Winding number of `f` around the boundary of `window`, i.e. the number of
/// zeros inside (with multiplicity) when `f` is holomorphic there.
pub fn count_zeros<T, F>(mut f: F, window: &ContourWindow<T>, options: ContourOptions<T>) -> Result<i64>
where
    T: Real,
    F: FnMut(Complex<T>) -> Result<Complex<T>>,
{
    let n = options.samples_per_side.max(2);
    let corners = window.corners();
    let quarter = T::FRAC_PI_2();
    let mut total = T::zero();
    let mut min_modulus = T::infinity();
    let mut max_jump = T::zero();

    let first = f(corners[0])?;
    let mut prev = first;
    min_modulus = min_modulus.min(first.norm());
    for side in 0..4 {
        let a = corners[side];
        let b = corners[(side + 1) % 4];
        for k in 1..=n {
            let s = T::from_usize_lossy(k) / T::from_usize_lossy(n);
            let z = a + (b - a) * s;
            let v = if side == 3 && k == n { first } else { f(z)? };
            let m = v.norm();
            if !m.is_finite() {
                return Err(NumericsError::NonFinite("contour sample"));
            }
            min_modulus = min_modulus.min(m);
            let ratio = v / prev;
            let jump = ratio.im.atan2(ratio.re);
            max_jump = max_jump.max(jump.abs());
            total += jump;
            prev = v;
        }
    }
    if min_modulus < options.threshold {
        return Err(NumericsError::ContourTooClose {
            min_modulus: min_modulus.to_f64().unwrap_or(0.0),
            threshold: options.threshold.to_f64().unwrap_or(0.0),
        });
    }
    if max_jump > quarter {
        return Err(NumericsError::Resolution { max_jump: max_jump.to_f64().unwrap_or(f64::NAN) });
    }
    let turns = total / (T::PI() + T::PI());
    Ok(turns.round().to_i64().unwrap_or(0))
}

/// [`count_zeros`] that doubles the sampling density until two consecutive
/// densities give the same count without resolution failures, up to
/// `max_samples_per_side`.
pub fn count_zeros_refined<T, F>(
    mut f: F,
    window: &ContourWindow<T>,
    mut options: ContourOptions<T>,
    max_samples_per_side: usize,
) -> Result<i64>
where
    T: Real,
    F: FnMut(Complex<T>) -> Result<Complex<T>>,
{
    let mut previous: Option<i64> = None;
    loop {
        let can_refine = options.samples_per_side * 2 <= max_samples_per_side;
        match count_zeros(&mut f, window, options) {
            Ok(n) if previous == Some(n) || !can_refine => return Ok(n),
            Ok(n) => previous = Some(n),
            Err(NumericsError::Resolution { .. }) if can_refine => previous = None,
            Err(e) => return Err(e),
        }
        options.samples_per_side *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_window(center: Complex<f64>) -> ContourWindow<f64> {
        ContourWindow::new(center, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn single_linear_zero() {
        let center = c(0.3, -0.7);
        let n = count_zeros(|z| Ok(z - center), &unit_window(center), ContourOptions::default()).unwrap();
        assert_eq!(n, 1);
    }

    #[test]
    fn constant_has_no_zeros() {
        let n = count_zeros(|_| Ok(c(1.0, 0.0)), &unit_window(c(5.0, 2.0)), ContourOptions::default()).unwrap();
        assert_eq!(n, 0);
    }

    #[test]
    fn zero_on_contour_is_reported() {
        let w = unit_window(c(0.0, 0.0));
        let err = count_zeros(|z| Ok(z - c(1.0, 0.0)), &w, ContourOptions { samples_per_side: 64, threshold: 1e-10 })
            .unwrap_err();
        assert!(matches!(err, NumericsError::ContourTooClose { .. }));
    }

    #[test]
    fn coarse_sampling_is_reported_and_refined() {
        let w = unit_window(c(0.0, 0.0));
        // e^{40 i z} winds quickly along the horizontal edges
        let f = |z: Complex<f64>| Ok((c(0.0, 40.0) * z).exp() - c(0.5, 0.0));
        let coarse = count_zeros(f, &w, ContourOptions { samples_per_side: 8, threshold: 1e-12 });
        assert!(matches!(coarse, Err(NumericsError::Resolution { .. })), "{coarse:?}");
        let n = count_zeros_refined(f, &w, ContourOptions { samples_per_side: 4, threshold: 1e-12 }, 1 << 14).unwrap();
        // zeros of e^{40iz} = 1/2: z = (2 pi k - i ln 2)/40 ... Im z = ln2/40 inside, Re in [-1,1]
        let expected = (-10..=10).filter(|k| (2.0 * std::f64::consts::PI * *k as f64 / 40.0).abs() <= 1.0).count();
        assert_eq!(n as usize, expected);
    }

    #[test]
    fn boundary_distance_inside_and_outside() {
        let w = ContourWindow::<f64>::from_bounds(0.0, 2.0, -1.0, 1.0).unwrap();
        assert!((w.boundary_distance(c(1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((w.boundary_distance(c(3.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((w.boundary_distance(c(0.5, 0.9)) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_windows() {
        assert!(ContourWindow::new(c(0.0, 0.0), 0.0, 1.0, 1.0).is_err());
        assert!(ContourWindow::new(c(0.0, 0.0), 1.0, -1.0, 1.0).is_err());
    }
}
