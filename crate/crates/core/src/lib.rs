//! Homoclinic resonance-instability laboratory.
//!
//! The crate derives homoclinic invariants of a two-dimensional Schrödinger
//! symbol `p(x, xi) = |xi|^2 + V(x)` with a hyperbolic barrier top, assembles the
//! homoclinic quantization matrices, and computes the pseudo-resonances of the
//! operator perturbed by a real potential of size `h^{1 + delta}`.
//!
//! All kernels are generic over the scalar type (see [`Real`]); the aliases below
//! fix `f64`, which is what every accuracy target is stated for.

pub mod dynamics;
pub mod numerics;
pub mod real;
pub mod spectral;

pub use num_complex::Complex;
pub use real::Real;

pub type Complex64 = Complex<f64>;
pub type ContourWindow = numerics::ContourWindow<f64>;
pub type PotentialSpec = dynamics::PotentialSpec<f64>;
pub type PhasePoint = dynamics::PhasePoint<f64>;
pub type Trajectory = dynamics::Trajectory<f64>;
pub type Homoclinic = dynamics::Homoclinic<f64>;
pub type HomoclinicDatum = dynamics::HomoclinicDatum<f64>;
pub type QuantizationInput = spectral::QuantizationInput<f64>;
pub type QuantizationMatrix = spectral::QuantizationMatrix<f64>;
pub type PseudoResonance = spectral::PseudoResonance<f64>;
pub type InstabilityReport = spectral::InstabilityReport;
