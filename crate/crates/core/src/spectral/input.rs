//! Homoclinic data consumed by the quantization matrices, and the synthetic
//! configurations realizing the two vanishing cases of `μ`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::error::{Result, SpectralError};
use crate::dynamics::{amplitude_b, delay_t, HomoclinicDatum};
use crate::numerics::gamma_complex;
use crate::real::{c, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    DynamicsDerived,
    Synthetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationInput<T> {
    pub data: Vec<HomoclinicDatum<T>>,
    pub lambda1: T,
    pub lambda2: T,
    pub e0: T,
    pub source: Source,
    /// Zero-based index of the trajectory met by `W`.
    #[serde(default)]
    pub perturbed: usize,
}

/// `S(z, h) = (λ₁+λ₂)/2 − i(z−E₀)/h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledParameter<T> {
    pub value: Complex<T>,
}

pub fn rescaled_s<T: Real>(z: Complex<T>, h: T, lambda1: T, lambda2: T, e0: T) -> RescaledParameter<T> {
    let sigma = (z - e0) / h;
    rescaled_s_sigma(sigma, lambda1, lambda2)
}

/// `S` from the scaled offset `σ = (z − E₀)/h`.
pub fn rescaled_s_sigma<T: Real>(sigma: Complex<T>, lambda1: T, lambda2: T) -> RescaledParameter<T> {
    let half = T::lit(0.5);
    RescaledParameter { value: c((lambda1 + lambda2) * half + sigma.im, -sigma.re) }
}

/// Record from which a datum with consistent `B` and `T` is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticRecord<T> {
    pub action_a: T,
    pub maslov_nu: i32,
    pub m_plus: T,
    pub m_minus: T,
    pub g_plus: T,
    pub g_minus: T,
    #[serde(default)]
    pub w_integral: T,
}

impl<T: Real> SyntheticRecord<T> {
    pub fn datum(&self, index: usize, lambda1: T, lambda2: T) -> Result<HomoclinicDatum<T>> {
        let b = amplitude_b(lambda1, lambda2, self.m_plus, self.m_minus, self.maslov_nu, self.g_plus, self.g_minus)
            .map_err(|e| match e {
                crate::dynamics::DynamicsError::Numerics(n) => SpectralError::Numerics(n),
                other => SpectralError::InvalidInput(other.to_string()),
            })?;
        Ok(HomoclinicDatum {
            index,
            action_a: self.action_a,
            amplitude_b: b,
            time_t: delay_t(lambda1, self.g_plus, self.g_minus),
            maslov_nu: self.maslov_nu,
            g_plus: [self.g_plus, T::zero()],
            g_minus: [self.g_minus, T::zero()],
            m_plus: self.m_plus,
            m_minus: self.m_minus,
            w_integral: self.w_integral,
        })
    }
}

fn g_norm<T: Real>(g: [T; 2]) -> T {
    g[0].hypot(g[1])
}

impl<T: Real> QuantizationInput<T> {
    pub fn from_records(records: &[SyntheticRecord<T>], lambda1: T, lambda2: T, e0: T) -> Result<Self> {
        let data = records
            .iter()
            .enumerate()
            .map(|(i, r)| r.datum(i + 1, lambda1, lambda2))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { data, lambda1, lambda2, e0, source: Source::Synthetic, perturbed: 0 })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SpectralError::InvalidInput(m));
        if self.data.len() < 2 {
            return bad(format!("need at least two homoclinic trajectories, got {}", self.data.len()));
        }
        if !(self.lambda1 > T::zero() && self.lambda1 < self.lambda2) {
            return bad("rates must satisfy 0 < lambda1 < lambda2".into());
        }
        if self.perturbed >= self.data.len() {
            return bad(format!("perturbed index {} out of range", self.perturbed));
        }
        for d in &self.data {
            if d.amplitude_b.norm() == T::zero() || !d.amplitude_b.norm().is_finite() {
                return bad(format!("B_{} must be finite and non-zero", d.index));
            }
            if !(d.m_plus > T::zero() && d.m_minus > T::zero() && g_norm(d.g_plus) > T::zero() && g_norm(d.g_minus) > T::zero()) {
                return bad(format!("trajectory {} has non-positive M or vanishing g", d.index));
            }
        }
        if self.w() != T::zero() {
            if let Some(d) = self.data.iter().enumerate().find(|(i, d)| *i != self.perturbed && d.w_integral != T::zero()) {
                return bad(format!("W meets trajectory {} besides the designated one", d.1.index));
            }
        }
        Ok(())
    }

    pub fn designated(&self) -> &HomoclinicDatum<T> {
        &self.data[self.perturbed]
    }

    /// `w = ∫ W(x(t)) dt` along the designated trajectory.
    pub fn w(&self) -> T {
        self.designated().w_integral
    }

    pub fn with_w(mut self, w: T) -> Self {
        let p = self.perturbed;
        self.data[p].w_integral = w;
        self
    }

    /// `μ(τ,h) = Γ((λ₁+λ₂)/(2λ₁) − iτ/λ₁) e^{−πτ/(2λ₁)} Σ e^{iA_k/h} B_k e^{iT_kτ}`.
    pub fn mu(&self, tau: Complex<T>, h: T) -> Result<Complex<T>> {
        let (l1, l2) = (self.lambda1, self.lambda2);
        let g = gamma_complex(c((l1 + l2) / (T::lit(2.0) * l1), T::zero()) - c(T::zero(), T::one()) * tau / l1)?;
        let pre = g * (-tau * T::PI() / (T::lit(2.0) * l1)).exp();
        Ok(pre * self.mu_sum(tau, h))
    }

    /// The sum `Σ e^{iA_k/h} B_k e^{iT_kτ}` alone.
    pub fn mu_sum(&self, tau: Complex<T>, h: T) -> Complex<T> {
        self.mu_terms(tau, h).into_iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    fn mu_terms(&self, tau: Complex<T>, h: T) -> Vec<Complex<T>> {
        let i = c(T::zero(), T::one());
        self.data
            .iter()
            .map(|d| Complex::from_polar(T::one(), d.action_a / h) * d.amplitude_b * (i * tau * d.time_t).exp())
            .collect()
    }

    /// Sum of the moduli of the terms of `μ`, the natural scale for relative comparisons.
    pub fn mu_scale(&self, tau: Complex<T>, h: T) -> Result<T> {
        let (l1, l2) = (self.lambda1, self.lambda2);
        let g = gamma_complex(c((l1 + l2) / (T::lit(2.0) * l1), T::zero()) - c(T::zero(), T::one()) * tau / l1)?;
        let pre = (g * (-tau * T::PI() / (T::lit(2.0) * l1)).exp()).norm();
        Ok(pre * self.mu_terms(tau, h).iter().fold(T::zero(), |a, t| a + t.norm()))
    }

    /// `μ̃(τ) = w Γ(1/2 − δ − iτ/λ₁) √(λ₁/2π) (M⁺/M⁻) e^{−iπ(ν+3/2)/2} |g₋| (iλ₁|g₊||g₋|)^{−1/2+δ+iτ/λ₁}`
    /// for the designated trajectory; `τ` may be complex.
    pub fn mu_tilde(&self, tau: Complex<T>, delta: T) -> Result<Complex<T>> {
        let d = self.designated();
        let l1 = self.lambda1;
        let half = T::lit(0.5);
        let i = c(T::zero(), T::one());
        let s = c(half - delta, T::zero()) - i * tau / l1;
        let g = gamma_complex(s)?;
        let (gp, gm) = (g_norm(d.g_plus), g_norm(d.g_minus));
        let amp = (l1 / (T::lit(2.0) * T::PI())).sqrt() * (d.m_plus / d.m_minus) * gm * self.w();
        let phase = Complex::from_polar(T::one(), -T::FRAC_PI_2() * (T::from_i64_lossy(d.maslov_nu as i64) + T::lit(1.5)));
        let log_base = c((l1 * gp * gm).ln(), T::FRAC_PI_2());
        Ok(g * phase * amp * (-s * log_base).exp())
    }

    /// Phase `ν ∈ (−π, π]` with `2B₁ = B₂ e^{iν}`.
    pub fn case_i_phase(&self) -> T {
        let r = self.data[0].amplitude_b * T::lit(2.0) / self.data[1].amplitude_b;
        r.arg()
    }

    pub fn check_case(&self, case: Case, tol: T) -> Result<()> {
        if self.data.len() != 3 {
            return Err(SpectralError::CaseMismatch(format!("expected three trajectories, got {}", self.data.len())));
        }
        let [d1, d2, d3] = [&self.data[0], &self.data[1], &self.data[2]];
        let close = |a: T, b: T, scale: T| (a - b).abs() <= tol * scale.max(T::one());
        let mismatch = |m: &str| Err(SpectralError::CaseMismatch(m.to_string()));
        let bscale = d1.amplitude_b.norm().max(d2.amplitude_b.norm());
        if !close(d1.action_a, d3.action_a, d1.action_a.abs()) {
            return mismatch("A1 != A3");
        }
        if (d1.amplitude_b - d3.amplitude_b).norm() > tol * bscale {
            return mismatch("B1 != B3");
        }
        if !(close(d1.time_t, d2.time_t, d1.time_t.abs()) && close(d1.time_t, d3.time_t, d1.time_t.abs())) {
            return mismatch("T1, T2, T3 differ");
        }
        match case {
            Case::I => {
                if ((d1.amplitude_b.norm() * T::lit(2.0)) - d2.amplitude_b.norm()).abs() > tol * bscale {
                    return mismatch("|2 B1| != |B2|");
                }
                if !(d2.action_a > d1.action_a) {
                    return mismatch("case I needs A2 > A1");
                }
            }
            Case::II => {
                if !close(d1.action_a, d2.action_a, d1.action_a.abs()) {
                    return mismatch("A1 != A2");
                }
                if (d1.amplitude_b * T::lit(2.0) + d2.amplitude_b).norm() > tol * bscale {
                    return mismatch("2 B1 != -B2");
                }
            }
        }
        Ok(())
    }

    /// The set of `h` where `μ(·, h)` vanishes identically: the explicit sequence
    /// `(A₂−A₁)/((2j+1)π+ν)` in case I, the grid `2^{-m}` in case II.
    pub fn admissible_h_set(&self, case: Case, j_max: usize) -> Result<Vec<T>> {
        self.check_case(case, T::lit(1e-8))?;
        Ok(match case {
            Case::I => {
                let da = self.data[1].action_a - self.data[0].action_a;
                let nu = self.case_i_phase();
                (0..=j_max)
                    .map(|j| da / (T::from_usize_lossy(2 * j + 1) * T::PI() + nu))
                    .filter(|h| *h > T::zero() && *h <= T::one())
                    .collect()
            }
            Case::II => (0..=j_max).map(|m| T::lit(0.5).powi(m as i32)).collect(),
        })
    }
}

impl QuantizationInput<f64> {
    /// Case II configuration: `A_k = 2π` and equal delays, `B₃ = B₁`, `B₂ = −2B₁`,
    /// with `W` on the first trajectory. On the dyadic grid `A/h` is then a multiple
    /// of `2π`, so the lattice pattern depends on `h` only through `|ln h|`.
    pub fn case_ii_reference() -> Self {
        let side = SyntheticRecord { action_a: std::f64::consts::TAU, maslov_nu: 0, m_plus: 1.0, m_minus: 1.0, g_plus: 1.0, g_minus: CASE_II_G_MINUS, w_integral: 0.0 };
        let middle = SyntheticRecord { maslov_nu: 2, m_plus: 2.0, ..side };
        let first = SyntheticRecord { w_integral: CASE_II_W, ..side };
        Self::from_records(&[first, middle, side], 1.0, 2.0, 1.0).expect("reference records are valid")
    }

    /// Case I configuration: `A₂ − A₁ = π`, `B₂ = 2B₁`, so that the admissible set is `{1/(2j+1)}`.
    pub fn case_i_reference() -> Self {
        let side = SyntheticRecord { action_a: 0.5, maslov_nu: 0, m_plus: 1.0, m_minus: 1.0, g_plus: 1.0, g_minus: 1.0, w_integral: 0.0 };
        let middle = SyntheticRecord { action_a: 0.5 + std::f64::consts::PI, m_plus: 2.0, ..side };
        let first = SyntheticRecord { w_integral: 0.5, ..side };
        Self::from_records(&[first, middle, side], 1.0, 2.0, 1.0).expect("reference records are valid")
    }
}

/// `|g₋|` of the case II reference; sets `T = 0.7`, which balances the drift of `arg Γ`
/// across the counting window.
pub const CASE_II_G_MINUS: f64 = 2.0137527074704766;
/// `w` of the case II reference.
pub const CASE_II_W: f64 = 0.75;
