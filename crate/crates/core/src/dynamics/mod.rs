//! Classical side: the model potential, its Hamiltonian flow and the homoclinic
//! invariants.

pub mod error;
pub mod flow;
pub mod homoclinic;
pub mod invariants;
pub mod jet;
pub mod ode;
pub mod potential;

pub use error::{DynamicsError, Result};
pub use flow::{
    hamiltonian_field, incoming_mismatch, integrate_flow, integrate_flow_with, linearization, local_manifold_seed,
    ManifoldSide, PhasePoint, Trajectory, DEFAULT_SEED_RADIUS,
};
pub use homoclinic::{find_homoclinics, shooting_profile, Fate, Homoclinic, HomoclinicSearch, SearchOptions};
pub use invariants::{
    amplitude_b, assemble_invariants, assemble_invariants_with, collinearity_angle, compute_action,
    compute_m_limits, delay_t, fit_g_vectors, w_integral, GFit, HomoclinicDatum, InvariantDiagnostics,
    InvariantOptions, MLimits,
};
pub use jet::Jet;
pub use ode::{Dopri5, OdeOptions};
pub use potential::{
    eval_gradient, eval_hessian, eval_potential, symbol, BarrierShape, BumpShape, CroissantShape, PotentialSpec,
};
