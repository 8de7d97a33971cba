//! Pseudo-resonances: the lattice `z_q(τ)`, the windowed solver and the
//! surrogate resolvents.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::error::{Result, SpectralError};
use super::input::QuantizationInput;
use super::matrix::{build_q_sigma, h_power, quantization_function_regularized, quantization_function_with_derivative};
use crate::numerics::{count_zeros_refined, newton_root, principal_ln, CMatrix, ContourOptions, ContourWindow, NumericsError};
use crate::real::{c, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoResonance<T> {
    pub z: Complex<T>,
    /// `(z − E₀)/h`.
    pub sigma: Complex<T>,
    pub q: i64,
    pub tau: T,
    pub residual: T,
    /// `|z − z_q(τ)|·|ln h|/h` for the paired lattice point.
    pub lattice_distance: T,
}

/// Scaled lattice point `(z_q(τ) − E₀)/h`.
pub fn lattice_sigma_q<T: Real>(input: &QuantizationInput<T>, tau: T, q: i64, h: T, delta: T) -> Result<Complex<T>> {
    let l = -h.ln();
    let l1 = input.lambda1;
    let a = input.designated().action_a;
    let mt = input.mu_tilde(c(tau, T::zero()), delta)?;
    let re = l1 * (T::from_i64_lossy(q) * T::TAU() - a / h) / l;
    let depth = -(input.lambda2 / T::lit(2.0) + delta * l1);
    Ok(c(re, depth) + c(T::zero(), l1 / l) * principal_ln(mt))
}

/// `z_q(τ) = E₀ − A₁λ₁/|ln h| + 2qπλ₁h/|ln h| − ih(λ₂/2 + δλ₁) + i ln(μ̃(τ))λ₁h/|ln h|`.
pub fn lattice_z_q<T: Real>(input: &QuantizationInput<T>, tau: T, q: i64, h: T, delta: T) -> Result<Complex<T>> {
    Ok(lattice_sigma_q(input, tau, q, h, delta)? * h + input.e0)
}

/// Localization width `ε(h) = 1/√|ln h|`.
pub fn localization_width<T: Real>(h: T) -> T {
    (-h.ln()).sqrt().recip()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint<T> {
    pub q: i64,
    pub tau: T,
    /// `(z_q(τ) − E₀)/h`, with `Re σ = τ`.
    pub sigma: Complex<T>,
}

/// `Θ(τ) = (τ|ln h|/λ₁ + A₁/h + arg μ̃(τ))/2π`; `Re σ_q(τ) = τ` exactly when `Θ(τ) = q`.
fn lattice_phase<T: Real>(input: &QuantizationInput<T>, tau: T, h: T, delta: T) -> Result<T> {
    let l = -h.ln();
    let mt = input.mu_tilde(c(tau, T::zero()), delta)?;
    Ok((tau * l / input.lambda1 + input.designated().action_a / h + mt.im.atan2(mt.re)) / T::TAU())
}

/// Every self-consistent lattice point `Re z_q(τ) = E₀ + τh` with `τ ∈ [τ_min, τ_max]`.
///
/// `Θ` jumps by one wherever the principal branch of `ln μ̃` wraps, so one index
/// may own two points and its neighbour none; crossings are located on each
/// continuous piece separately.
pub fn lattice_points<T: Real>(input: &QuantizationInput<T>, h: T, delta: T, tau_min: T, tau_max: T) -> Result<Vec<LatticePoint<T>>> {
    let l = -h.ln();
    let step = (T::lit(0.05) * input.lambda1 / l).min(T::lit(0.01));
    let n = ((tau_max - tau_min) / step).ceil().to_usize().unwrap_or(1).max(1);
    let mut out = Vec::new();
    let mut a = tau_min;
    let mut ta = lattice_phase(input, a, h, delta)?;
    for i in 1..=n {
        let b = tau_min + (tau_max - tau_min) * T::from_usize_lossy(i) / T::from_usize_lossy(n);
        let tb = lattice_phase(input, b, h, delta)?;
        crossings(input, h, delta, (a, ta), (b, tb), &mut out)?;
        a = b;
        ta = tb;
    }
    out.dedup_by(|x, y| x.q == y.q && (x.tau - y.tau).abs() < T::lit(1e-9));
    for p in &mut out {
        p.sigma = lattice_sigma_q(input, p.tau, p.q, h, delta)?;
    }
    Ok(out)
}

fn crossings<T: Real>(
    input: &QuantizationInput<T>,
    h: T,
    delta: T,
    (a, ta): (T, T),
    (b, tb): (T, T),
    out: &mut Vec<LatticePoint<T>>,
) -> Result<()> {
    let half = T::lit(0.5);
    if (tb - ta).abs() >= half {
        if b - a < T::lit(1e-12) {
            return Ok(());
        }
        let m = (a + b) * half;
        let tm = lattice_phase(input, m, h, delta)?;
        crossings(input, h, delta, (a, ta), (m, tm), out)?;
        return crossings(input, h, delta, (m, tm), (b, tb), out);
    }
    let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
    let mut k = lo.floor() + T::one();
    while k <= hi {
        let (mut x0, mut x1, mut f0) = (a, b, ta - k);
        for _ in 0..80 {
            let xm = (x0 + x1) * half;
            let fm = lattice_phase(input, xm, h, delta)? - k;
            if (fm < T::zero()) == (f0 < T::zero()) {
                x0 = xm;
                f0 = fm;
            } else {
                x1 = xm;
            }
        }
        let q = k.to_i64().unwrap_or(0);
        out.push(LatticePoint { q, tau: (x0 + x1) * half, sigma: Complex::new(T::zero(), T::zero()) });
        k = k + T::one();
    }
    Ok(())
}

/// Nearest lattice index to `σ` and the distance `|σ − σ_q(Re σ)|` in units of `1/|ln h|`.
pub fn pair_with_lattice<T: Real>(input: &QuantizationInput<T>, sigma: Complex<T>, h: T, delta: T) -> Result<(i64, T)> {
    let tau = sigma.re;
    let base = lattice_sigma_q(input, tau, 0, h, delta)?;
    let l = -h.ln();
    let step = input.lambda1 * T::TAU() / l;
    let q0 = ((sigma.re - base.re) / step).round().to_i64().unwrap_or(0);
    let mut best = (q0, T::infinity());
    for q in [q0 - 1, q0, q0 + 1] {
        let d = (sigma - base - c(step * T::from_i64_lossy(q), T::zero())).norm();
        if d < best.1 {
            best = (q, d);
        }
    }
    Ok((best.0, best.1 * l))
}

/// The window `E₀ + [−Ch, Ch] + i[−(λ₂/2 + δλ₁)h − C_low·h/|ln h|, h]`.
pub fn lemma_window<T: Real>(input: &QuantizationInput<T>, h: T, delta: T, c_re: T, c_low: T) -> Result<ContourWindow<T>> {
    let l = -h.ln();
    let depth = input.lambda2 / T::lit(2.0) + delta * input.lambda1;
    Ok(ContourWindow::from_bounds(
        input.e0 - c_re * h,
        input.e0 + c_re * h,
        -(depth + c_low / l) * h,
        h,
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions<T> {
    pub newton_tol: T,
    pub max_iter: usize,
    pub samples_per_side: usize,
    pub max_samples_per_side: usize,
    pub contour_threshold: T,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            newton_tol: T::lit(1e-12),
            max_iter: 60,
            samples_per_side: 256,
            max_samples_per_side: 1 << 15,
            contour_threshold: T::lit(1e-10),
        }
    }
}

fn sigma_window<T: Real>(input: &QuantizationInput<T>, h: T, window: &ContourWindow<T>) -> Result<ContourWindow<T>> {
    Ok(ContourWindow::from_bounds(
        (window.re_min() - input.e0) / h,
        (window.re_max() - input.e0) / h,
        window.im_min() / h,
        window.im_max() / h,
    )?)
}

fn newton_sigma<T: Real>(input: &QuantizationInput<T>, seed: Complex<T>, h: T, delta: T, opts: &SolverOptions<T>) -> Option<(Complex<T>, T)> {
    newton_root(|s| quantization_function_with_derivative(input, s, h, delta).map_err(to_numerics), seed, opts.newton_tol, opts.max_iter)
        .ok()
        .map(|r| (r.root, r.residual))
}

fn to_numerics(e: SpectralError) -> NumericsError {
    match e {
        SpectralError::Numerics(n) => n,
        other => NumericsError::Domain(other.to_string()),
    }
}

fn insert_root<T: Real>(roots: &mut Vec<(Complex<T>, T)>, root: (Complex<T>, T), radius: T) {
    if roots.iter().all(|(r, _)| (*r - root.0).norm() > radius) {
        roots.push(root);
    }
}

/// Winding number of `F/Γ(S/λ₁)` around the σ-window; edges are nudged inward
/// when a zero sits on the contour. Returns the count and the window used.
fn certified_count<T: Real>(
    input: &QuantizationInput<T>,
    h: T,
    delta: T,
    window: &ContourWindow<T>,
    opts: &SolverOptions<T>,
) -> Result<(i64, ContourWindow<T>)> {
    let l = -h.ln();
    let contour = ContourOptions { samples_per_side: opts.samples_per_side, threshold: opts.contour_threshold };
    let mut w = *window;
    let mut last = None;
    for attempt in 0..8 {
        match count_zeros_refined(|s| Ok(quantization_function_regularized(input, s, h, delta)), &w, contour, opts.max_samples_per_side) {
            Ok(n) => return Ok((n, w)),
            Err(e @ NumericsError::ContourTooClose { .. }) => {
                last = Some(e);
                let nudge = T::lit(1e-3) * T::from_usize_lossy(attempt + 1) / l;
                w = ContourWindow::from_bounds(w.re_min() + nudge, w.re_max() - nudge, w.im_min() + nudge, w.im_max() - nudge)?;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(last.expect("loop ran").into())
}

/// Pseudo-resonances in the σ-window: lattice seeds refined by Newton and
/// certified complete by the argument principle.
pub fn pseudo_resonances_sigma<T: Real>(
    input: &QuantizationInput<T>,
    h: T,
    delta: T,
    window: &ContourWindow<T>,
    opts: &SolverOptions<T>,
) -> Result<Vec<PseudoResonance<T>>> {
    if input.w() == T::zero() {
        return Ok(Vec::new());
    }
    let l = -h.ln();
    let l1 = input.lambda1;
    let radius = T::lit(0.5) / l;
    let margin = T::lit(2.0) * T::PI() * l1 / l;
    let (re_lo, re_hi) = (window.re_min() - margin, window.re_max() + margin);

    let mut roots: Vec<(Complex<T>, T)> = Vec::new();
    for p in lattice_points(input, h, delta, re_lo, re_hi)? {
        if let Some(r) = newton_sigma(input, p.sigma, h, delta, opts) {
            insert_root(&mut roots, r, radius);
        }
    }

    let (count, used) = certified_count(input, h, delta, window, opts)?;
    let inside = |roots: &[(Complex<T>, T)]| roots.iter().filter(|(r, _)| used.contains(*r)).count() as i64;
    if inside(&roots) != count {
        // grid seeds at half the lattice spacing across the window
        let step = T::PI() * l1 / l;
        let n_re = ((window.re_max() - window.re_min()) / step).ceil().to_usize().unwrap_or(0) + 1;
        let n_im = 6;
        for i in 0..=n_re {
            for j in 0..=n_im {
                let s = c(
                    window.re_min() + step * T::from_usize_lossy(i),
                    window.im_min() + (window.im_max() - window.im_min()) * T::from_usize_lossy(j) / T::from_usize_lossy(n_im),
                );
                if let Some(r) = newton_sigma(input, s, h, delta, opts) {
                    insert_root(&mut roots, r, radius);
                }
            }
        }
        let found = inside(&roots);
        if found != count {
            return Err(SpectralError::CountMismatch { found: found as usize, counted: count });
        }
    }

    let mut out = Vec::new();
    for (sigma, residual) in roots.into_iter().filter(|(r, _)| window.contains(*r)) {
        let (q, lattice_distance) = pair_with_lattice(input, sigma, h, delta)?;
        out.push(PseudoResonance { z: sigma * h + input.e0, sigma, q, tau: sigma.re, residual, lattice_distance });
    }
    out.sort_by(|x, y| x.sigma.re.partial_cmp(&y.sigma.re).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Pseudo-resonances of `P + h^{1+δ}W` in a window of the `z`-plane, sorted by `Re z`.
pub fn pseudo_resonances_in_window<T: Real>(
    input: &QuantizationInput<T>,
    h: T,
    delta: T,
    window: &ContourWindow<T>,
    opts: &SolverOptions<T>,
) -> Result<Vec<PseudoResonance<T>>> {
    input.validate()?;
    if !(h > T::zero() && h < T::one()) {
        return Err(SpectralError::InvalidInput(format!("h = {h} must lie in (0, 1)")));
    }
    if !(delta > T::zero() && delta < T::lit(0.5)) {
        return Err(SpectralError::InvalidInput(format!("delta = {delta} must lie in (0, 1/2)")));
    }
    pseudo_resonances_sigma(input, h, delta, &sigma_window(input, h, window)?, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateNorm<T> {
    /// Operator norm of the directly inverted `(1 − h^{S/λ₁−1/2}𝒬)`.
    pub norm: T,
    /// Operator norm of `1 + h^{S/λ₁−1/2}𝒬` (unperturbed only).
    pub nilpotent_norm: Option<T>,
    /// Largest entrywise gap between the two inverses, relative to the larger norm.
    pub identity_deviation: Option<T>,
}

/// Norm of `(1 − h^{S/λ₁−1/2}𝒬)^{-1}`, or of the same with `𝒬̃` when `perturbed`.
pub fn resolvent_surrogate<T: Real>(
    input: &QuantizationInput<T>,
    z: Complex<T>,
    h: T,
    delta: T,
    perturbed: bool,
) -> Result<SurrogateNorm<T>> {
    let sigma = (z - input.e0) / h;
    let l = -h.ln();
    let mut q = build_q_sigma(input, sigma, h)?;
    if perturbed {
        let opts = SolverOptions::default();
        if input.w() != T::zero() {
            if let Some((root, _)) = newton_sigma(input, sigma, h, delta, &opts) {
                let distance = (root - sigma).norm() * l;
                if distance < T::lit(1e-3) {
                    return Err(SpectralError::SingularMatrix { distance: distance.to_f64().unwrap_or(0.0) });
                }
            }
        }
        let rot = Complex::from_polar(T::one(), -input.w() * h.powf(delta));
        let p = input.perturbed;
        for k in 0..q.dim() {
            q[(p, k)] = q[(p, k)] * rot;
        }
    }
    let n = q.scale(h_power(input, sigma, h, T::zero()));
    let id = CMatrix::identity(n.dim());
    let inverse = id.sub(&n).inverse().map_err(|_| SpectralError::SingularMatrix { distance: 0.0 })?;
    let norm = inverse.operator_norm();
    if perturbed {
        return Ok(SurrogateNorm { norm, nilpotent_norm: None, identity_deviation: None });
    }
    let nil = id.add(&n);
    let nil_norm = nil.operator_norm();
    let deviation = inverse.sub(&nil).max_abs() / nil.max_abs().max(inverse.max_abs());
    Ok(SurrogateNorm { norm, nilpotent_norm: Some(nil_norm), identity_deviation: Some(deviation) })
}
