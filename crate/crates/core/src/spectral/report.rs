//! Resonance-instability report: surrogate certificate for the unperturbed
//! operator, perturbed pseudo-resonances and the trapping proxies.

use serde::{Deserialize, Serialize};

use super::error::{Result, SpectralError};
use super::input::QuantizationInput;
use super::matrix::build_q_sigma;
use super::resonance::{lemma_window, pseudo_resonances_in_window, PseudoResonance, SolverOptions};
use crate::real::c;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Window coefficients in units of `h`: the solver window spans `Re σ ∈ [−C, C]`
/// with lower edge `−(λ₂/2 + δλ₁) − C_low/|ln h|`; proxies are taken over `Re σ ∈ [A, B]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowParams {
    pub c: f64,
    pub a: f64,
    pub b: f64,
    #[serde(default = "default_c_low")]
    pub c_low: f64,
}

fn default_c_low() -> f64 {
    1.0
}

impl Default for WindowParams {
    fn default() -> Self {
        Self { c: 6.0, a: -5.5, b: 0.0, c_low: default_c_low() }
    }
}

impl WindowParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && -self.c <= self.a && self.a < self.b && self.b <= self.c) {
            return Err(SpectralError::InvalidInput(format!(
                "window must satisfy -C <= A < B <= C with C > 0 (C = {}, A = {}, B = {})",
                self.c, self.a, self.b
            )));
        }
        if !(self.c_low > 0.0 && self.c_low.is_finite()) {
            return Err(SpectralError::InvalidInput("c_low must be positive".into()));
        }
        Ok(())
    }
}

/// Matrix-level stand-in for the resonance-free strip of the unperturbed operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateCertificate {
    pub label: String,
    /// Largest `‖𝒬²‖/‖𝒬‖²` over the sampled strip.
    pub max_nilpotency_ratio: f64,
    pub max_relative_minor: f64,
    /// Certified depth `(λ₂/2 + α)h`.
    pub depth: f64,
    pub samples: usize,
    pub pole_free: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HEntry {
    pub h: f64,
    pub log_h_abs: f64,
    pub certificate: SurrogateCertificate,
    pub unperturbed_depth: f64,
    pub pseudo_resonances: Vec<PseudoResonance<f64>>,
    pub perturbed_depths: Vec<f64>,
    /// `Im z / h` of the pseudo-resonance closest to the real axis with `Re σ ∈ [A, B]`.
    pub top_depth_over_h: Option<f64>,
    pub count_window: usize,
    pub count_ab: usize,
    pub expected_count_ab: f64,
    pub qt_proxy: f64,
    pub ess_qt_proxy: f64,
    pub trapping_increase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstabilityReport {
    pub schema_version: u32,
    pub lambda1: f64,
    pub lambda2: f64,
    pub d0: f64,
    pub delta: f64,
    pub alpha: f64,
    pub window: WindowParams,
    pub h_list: Vec<f64>,
    /// Members of `h_list` at which the surrogate certificate holds.
    pub hset: Vec<f64>,
    pub unperturbed_depth: Vec<f64>,
    pub perturbed_depths: Vec<Vec<f64>>,
    pub counts: Vec<usize>,
    pub entries: Vec<HEntry>,
    /// Proxies at the smallest `h`.
    pub qt_proxy: f64,
    pub ess_qt_proxy: f64,
    /// `1/(D₀ + α)`, the unperturbed upper bound granted by the certificate.
    pub unperturbed_ess_qt_bound: f64,
    pub trapping_increase: f64,
    pub trapping_increase_bound: f64,
    /// `(α − δ)h` at the smallest `h`.
    pub depth_gap: f64,
}

const CERTIFICATE_TOL: f64 = 1e-10;

fn certificate(input: &QuantizationInput<f64>, h: f64, alpha: f64, c_re: f64) -> Result<SurrogateCertificate> {
    let (n_re, n_im) = (33, 9);
    let d0 = input.lambda2 / 2.0;
    let bottom = -(d0 + alpha);
    let mut worst = 0.0f64;
    let mut minor = 0.0f64;
    for i in 0..n_re {
        for j in 0..n_im {
            let re = -c_re + 2.0 * c_re * i as f64 / (n_re - 1) as f64;
            let im = bottom + (1.0 - bottom) * j as f64 / (n_im - 1) as f64;
            let q = build_q_sigma(input, c(re, im), h)?;
            let n = q.frobenius();
            worst = worst.max(q.matmul(&q).frobenius() / (n * n));
            minor = minor.max(q.max_relative_minor());
        }
    }
    Ok(SurrogateCertificate {
        label: "surrogate certificate".into(),
        max_nilpotency_ratio: worst,
        max_relative_minor: minor,
        depth: (d0 + alpha) * h,
        samples: n_re * n_im,
        pole_free: worst < CERTIFICATE_TOL && minor < CERTIFICATE_TOL,
    })
}

/// `(n+1)`-th largest value with `n = ⌊N/2⌋` of the trapping ratios, the finite-set
/// stand-in for removing an unbounded number of resonances.
pub fn essential_proxy(mut ratios: Vec<f64>) -> f64 {
    if ratios.is_empty() {
        return 0.0;
    }
    ratios.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    ratios[ratios.len() / 2]
}

/// Trapping lower bound `(α − δ)/((D₀ + α)(D₀ + δ))`.
pub fn trapping_increase_bound(d0: f64, alpha: f64, delta: f64) -> f64 {
    (alpha - delta) / ((d0 + alpha) * (d0 + delta))
}

fn check_parameters(input: &QuantizationInput<f64>, delta: f64, alpha: f64, window: &WindowParams) -> Result<()> {
    input.validate()?;
    window.validate()?;
    if !(alpha > 0.0 && alpha < input.lambda1 / 2.0) {
        return Err(SpectralError::InvalidInput(format!("alpha = {alpha} must lie in (0, lambda1/2)")));
    }
    if !(delta > 0.0 && delta < alpha) {
        return Err(SpectralError::InvalidInput(format!("delta = {delta} must lie in (0, alpha)")));
    }
    Ok(())
}

/// Certificate, pseudo-resonances and proxies at one `h`.
pub fn h_entry(
    input: &QuantizationInput<f64>,
    delta: f64,
    alpha: f64,
    h: f64,
    window: WindowParams,
    opts: &SolverOptions<f64>,
) -> Result<HEntry> {
    check_parameters(input, delta, alpha, &window)?;
    let l1 = input.lambda1;
    let unperturbed_bound = 1.0 / (input.lambda2 / 2.0 + alpha);
    let l = -h.ln();
    let cert = certificate(input, h, alpha, window.c)?;
    let w = lemma_window(input, h, delta, window.c, window.c_low)?;
    let found = pseudo_resonances_in_window(input, h, delta, &w, opts)?;
    let in_ab: Vec<&PseudoResonance<f64>> =
        found.iter().filter(|r| r.sigma.re >= window.a && r.sigma.re <= window.b).collect();
    let qt = found.iter().map(|r| 1.0 / r.sigma.im.abs()).fold(0.0, f64::max);
    let ess = essential_proxy(in_ab.iter().map(|r| 1.0 / r.sigma.im.abs()).collect());
    Ok(HEntry {
        h,
        log_h_abs: l,
        unperturbed_depth: cert.depth,
        certificate: cert,
        perturbed_depths: found.iter().map(|r| r.z.im).collect(),
        top_depth_over_h: in_ab.iter().map(|r| r.sigma.im).reduce(f64::max),
        count_window: found.len(),
        count_ab: in_ab.len(),
        expected_count_ab: (window.b - window.a) * l / (2.0 * std::f64::consts::PI * l1),
        qt_proxy: qt,
        ess_qt_proxy: ess,
        trapping_increase: ess - unperturbed_bound,
        pseudo_resonances: found,
    })
}

/// Report over entries computed by [`h_entry`], kept in the given order.
pub fn assemble_report(
    input: &QuantizationInput<f64>,
    delta: f64,
    alpha: f64,
    window: WindowParams,
    entries: Vec<HEntry>,
) -> Result<InstabilityReport> {
    check_parameters(input, delta, alpha, &window)?;
    let Some(last) = entries.iter().min_by(|a, b| a.h.total_cmp(&b.h)).cloned() else {
        return Err(SpectralError::InvalidInput("empty h list".into()));
    };
    let d0 = input.lambda2 / 2.0;
    Ok(InstabilityReport {
        schema_version: REPORT_SCHEMA_VERSION,
        lambda1: input.lambda1,
        lambda2: input.lambda2,
        d0,
        delta,
        alpha,
        window,
        h_list: entries.iter().map(|e| e.h).collect(),
        hset: entries.iter().filter(|e| e.certificate.pole_free).map(|e| e.h).collect(),
        unperturbed_depth: entries.iter().map(|e| e.unperturbed_depth).collect(),
        perturbed_depths: entries.iter().map(|e| e.perturbed_depths.clone()).collect(),
        counts: entries.iter().map(|e| e.count_ab).collect(),
        qt_proxy: last.qt_proxy,
        ess_qt_proxy: last.ess_qt_proxy,
        unperturbed_ess_qt_bound: 1.0 / (d0 + alpha),
        trapping_increase: last.trapping_increase,
        trapping_increase_bound: trapping_increase_bound(d0, alpha, delta),
        depth_gap: (alpha - delta) * last.h,
        entries,
    })
}

pub fn instability_report(
    input: &QuantizationInput<f64>,
    delta: f64,
    alpha: f64,
    h_list: &[f64],
    window: WindowParams,
    opts: &SolverOptions<f64>,
) -> Result<InstabilityReport> {
    check_parameters(input, delta, alpha, &window)?;
    if h_list.is_empty() {
        return Err(SpectralError::InvalidInput("empty h list".into()));
    }
    let entries = h_list
        .iter()
        .map(|&h| h_entry(input, delta, alpha, h, window, opts))
        .collect::<Result<Vec<_>>>()?;
    assemble_report(input, delta, alpha, window, entries)
}
