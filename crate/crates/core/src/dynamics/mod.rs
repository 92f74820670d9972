//! Skew products `T(x, y) = (x + α, y + h(x))` with finitely supported `h`.
//!
//! Frequencies `m = m_k q_k` with `1 ≤ |m_k| ≤ a_k` are said to sit on scale
//! `k`; the approximations of the Birkhoff sum only see these lattice modes.

pub mod approx;
pub mod birkhoff;
pub mod fourier;
pub mod phi;
pub mod resonant;
pub mod skew;

pub use approx::{approx_h1, approx_h2, residual_h1, residual_h2, step_bound, step_sum, truncated_h, truncation_error};
pub use birkhoff::{birkhoff_closed, birkhoff_exact, birkhoff_exact_capped, birkhoff_orbit_mod1, transfer_eval, OrbitMod1};
pub use fourier::FourierModel;
pub use phi::{
    h2_identity_gap, incre_per_residual, period_drift, phi_ladder, phi_table, phi_tilde_ladder, product_decay,
    DecayFactor, PhiTable,
};
pub use resonant::{
    frequencies_by_scale, make_coboundary, psi_conjugator, resonant_set, solve_coboundary, synth_h, CoboundarySpec,
    Conjugator, ResonantEntry, ResonantSet, SynthOptions,
};
pub use skew::{lattice_scale, FiberValue, SkewProduct};
