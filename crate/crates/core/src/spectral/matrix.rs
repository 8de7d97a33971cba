//! Homoclinic quantization matrices and the scalar form of the quantization rule.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::error::{Result, SpectralError};
use super::input::{rescaled_s_sigma, QuantizationInput};
use crate::numerics::{digamma, gamma_complex, recip_gamma, CMatrix};
use crate::real::{c, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationMatrix<T> {
    pub entries: CMatrix<T>,
    pub z: Complex<T>,
    pub h: T,
    pub perturbed: bool,
    pub delta: Option<T>,
}

impl<T: Real> QuantizationMatrix<T> {
    pub fn trace(&self) -> Complex<T> {
        self.entries.trace()
    }

    /// `‖𝒬²‖ / ‖𝒬‖²` in the Frobenius norm.
    pub fn nilpotency_ratio(&self) -> T {
        let n = self.entries.frobenius();
        self.entries.matmul(&self.entries).frobenius() / (n * n)
    }
}

fn validate_h<T: Real>(h: T) -> Result<()> {
    if h > T::zero() && h <= T::one() {
        Ok(())
    } else {
        Err(SpectralError::InvalidInput(format!("h = {h} must lie in (0, 1]")))
    }
}

fn validate_delta<T: Real>(delta: T) -> Result<()> {
    if delta > T::zero() && delta < T::lit(0.5) {
        Ok(())
    } else {
        Err(SpectralError::InvalidInput(format!("delta = {delta} must lie in (0, 1/2)")))
    }
}

/// Row factor `α_k` without Γ and the column factor `β_l`, with `𝒬_{k,l} = Γ(S/λ₁) α_k β_l`.
struct Factors<T> {
    gamma: Complex<T>,
    alpha: Vec<Complex<T>>,
    beta: Vec<Complex<T>>,
}

fn g_norm<T: Real>(g: [T; 2]) -> T {
    g[0].hypot(g[1])
}

fn factors<T: Real>(input: &QuantizationInput<T>, sigma: Complex<T>, h: T) -> Result<Factors<T>> {
    let l1 = input.lambda1;
    let s = rescaled_s_sigma(sigma, l1, input.lambda2).value / l1;
    let gamma = gamma_complex(s)?;
    let root = (l1 / (T::lit(2.0) * T::PI())).sqrt();
    // (iλ₁|g₊ᵏ||g₋ˡ|)^{−s} splits as (λ₁|g₊ᵏ|)^{−s} · (i|g₋ˡ|)^{−s} on the principal branch
    let alpha = input
        .data
        .iter()
        .map(|d| {
            let maslov = -T::FRAC_PI_2() * (T::from_i64_lossy(d.maslov_nu as i64) + T::lit(0.5));
            let log = c((l1 * g_norm(d.g_plus)).ln(), T::zero());
            Complex::from_polar(T::one(), d.action_a / h) * Complex::from_polar(root * d.m_plus / d.m_minus, maslov) * (-s * log).exp()
        })
        .collect();
    let beta = input
        .data
        .iter()
        .map(|d| {
            let gm = g_norm(d.g_minus);
            (-s * c(gm.ln(), T::FRAC_PI_2())).exp() * gm
        })
        .collect();
    Ok(Factors { gamma, alpha, beta })
}

/// `𝒬(σ, h)` at the scaled offset `σ = (z − E₀)/h`.
pub fn build_q_sigma<T: Real>(input: &QuantizationInput<T>, sigma: Complex<T>, h: T) -> Result<CMatrix<T>> {
    let f = factors(input, sigma, h)?;
    Ok(CMatrix::from_fn(input.data.len(), |k, l| f.gamma * f.alpha[k] * f.beta[l]))
}

pub fn build_q<T: Real>(input: &QuantizationInput<T>, z: Complex<T>, h: T) -> Result<QuantizationMatrix<T>> {
    validate_h(h)?;
    let entries = build_q_sigma(input, (z - input.e0) / h, h)?;
    Ok(QuantizationMatrix { entries, z, h, perturbed: false, delta: None })
}

/// `𝒬̃`: the row of the designated trajectory multiplied by `e^{−iwh^δ}`.
pub fn build_q_tilde<T: Real>(input: &QuantizationInput<T>, z: Complex<T>, h: T, delta: T) -> Result<QuantizationMatrix<T>> {
    validate_h(h)?;
    validate_delta(delta)?;
    let mut entries = build_q_sigma(input, (z - input.e0) / h, h)?;
    let rot = Complex::from_polar(T::one(), -input.w() * h.powf(delta));
    let p = input.perturbed;
    for l in 0..entries.dim() {
        entries[(p, l)] = entries[(p, l)] * rot;
    }
    Ok(QuantizationMatrix { entries, z, h, perturbed: true, delta: Some(delta) })
}

/// `𝒲 = diag(−iw, 0, 0)` with the non-zero slot at the designated trajectory.
pub fn w_matrix<T: Real>(input: &QuantizationInput<T>) -> CMatrix<T> {
    let mut m = CMatrix::zeros(input.data.len());
    m[(input.perturbed, input.perturbed)] = c(T::zero(), -input.w());
    m
}

/// Eigenvalues of `𝒲𝒬`: `−iw𝒬₁,₁` and the remaining zeros.
pub fn wq_eigenvalues<T: Real>(input: &QuantizationInput<T>, z: Complex<T>, h: T) -> Result<(Complex<T>, Vec<Complex<T>>)> {
    let q = build_q(input, z, h)?;
    let p = input.perturbed;
    let nonzero = c(T::zero(), -input.w()) * q.entries[(p, p)];
    Ok((nonzero, vec![Complex::new(T::zero(), T::zero()); input.data.len() - 1]))
}

/// `h^{S/λ₁ − 1/2 + shift}` at the scaled offset `σ`.
pub fn h_power<T: Real>(input: &QuantizationInput<T>, sigma: Complex<T>, h: T, shift: T) -> Complex<T> {
    let s = rescaled_s_sigma(sigma, input.lambda1, input.lambda2).value / input.lambda1;
    ((s - T::lit(0.5) + shift) * h.ln()).exp()
}

/// `G(σ) = h^{S/λ₁−1/2+δ}(−iw𝒬₁,₁)`, so that the quantization function is `G − 1`.
fn g_sigma<T: Real>(input: &QuantizationInput<T>, sigma: Complex<T>, h: T, delta: T) -> Result<Complex<T>> {
    let f = factors(input, sigma, h)?;
    let p = input.perturbed;
    Ok(h_power(input, sigma, h, delta) * c(T::zero(), -input.w()) * f.gamma * f.alpha[p] * f.beta[p])
}

/// `F` at the scaled offset `σ`.
pub fn quantization_function_sigma<T: Real>(input: &QuantizationInput<T>, sigma: Complex<T>, h: T, delta: T) -> Result<Complex<T>> {
    Ok(g_sigma(input, sigma, h, delta)? - T::one())
}

/// `F(z) = h^{S/λ₁−1/2+δ}(−iw𝒬₁,₁(z,h)) − 1`.
pub fn quantization_function<T: Real>(input: &QuantizationInput<T>, z: Complex<T>, h: T, delta: T) -> Result<Complex<T>> {
    validate_h(h)?;
    validate_delta(delta)?;
    quantization_function_sigma(input, (z - input.e0) / h, h, delta)
}

/// `(F(σ), dF/dσ)` from the logarithmic derivative of `G`.
pub fn quantization_function_with_derivative<T: Real>(
    input: &QuantizationInput<T>,
    sigma: Complex<T>,
    h: T,
    delta: T,
) -> Result<(Complex<T>, Complex<T>)> {
    let g = g_sigma(input, sigma, h, delta)?;
    let l1 = input.lambda1;
    let d = input.designated();
    let s = rescaled_s_sigma(sigma, l1, input.lambda2).value / l1;
    let log_x = c((l1 * g_norm(d.g_plus) * g_norm(d.g_minus)).ln(), T::FRAC_PI_2());
    let dlog = (digamma(s)? + h.ln() - log_x) * c(T::zero(), -T::one() / l1);
    Ok((g - T::one(), g * dlog))
}

/// `F(σ)/Γ(S/λ₁)`, entire in `σ` with the same zeros as `F` inside the window.
pub fn quantization_function_regularized<T: Real>(input: &QuantizationInput<T>, sigma: Complex<T>, h: T, delta: T) -> Complex<T> {
    let l1 = input.lambda1;
    let s = rescaled_s_sigma(sigma, l1, input.lambda2).value / l1;
    let p = input.perturbed;
    let d = &input.data[p];
    let root = (l1 / (T::lit(2.0) * T::PI())).sqrt();
    let (gp, gm) = (g_norm(d.g_plus), g_norm(d.g_minus));
    let phase = d.action_a / h - T::FRAC_PI_2() * (T::from_i64_lossy(d.maslov_nu as i64) + T::lit(0.5));
    let log_x = c((l1 * gp * gm).ln(), T::FRAC_PI_2());
    let amp = Complex::from_polar(root * d.m_plus / d.m_minus * gm * input.w(), phase) * c(T::zero(), -T::one());
    h_power(input, sigma, h, delta) * amp * (-s * log_x).exp() - recip_gamma(s)
}
