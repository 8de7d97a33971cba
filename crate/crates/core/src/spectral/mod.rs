//! Spectral side: `μ(τ,h)`, the admissible set `ℋ`, the quantization matrices,
//! pseudo-resonances and the instability report.

mod error;
mod input;
mod matrix;
mod report;
mod resonance;

pub use error::{Result, SpectralError};
pub use input::{rescaled_s, rescaled_s_sigma, Case, QuantizationInput, RescaledParameter, Source, SyntheticRecord, CASE_II_G_MINUS, CASE_II_W};
pub use matrix::{
    build_q, build_q_sigma, build_q_tilde, h_power, quantization_function, quantization_function_regularized,
    quantization_function_sigma, quantization_function_with_derivative, w_matrix, wq_eigenvalues, QuantizationMatrix,
};
pub use report::{
    assemble_report, essential_proxy, h_entry, instability_report, trapping_increase_bound, HEntry, InstabilityReport, SurrogateCertificate, WindowParams,
    REPORT_SCHEMA_VERSION,
};
pub use resonance::{
    lattice_sigma_q, lattice_z_q, lemma_window, lattice_points, localization_width, LatticePoint, pair_with_lattice, pseudo_resonances_in_window, pseudo_resonances_sigma,
    resolvent_surrogate, PseudoResonance, SolverOptions, SurrogateNorm,
};
