//! Zeno-limit analysis of a targeted pure state.
//!
//! All block quantities live in the rotated basis `|e^j⟩ ⊗ |α⟩`, where
//! `|e⁰⟩ = ψ_Zeno`, `|e¹⟩ = ψ_Zeno^⊥` and `|0⟩ = ψ_target`. Operators are
//! stored in block order (`H_0` index slow, `H_1` index fast) in that
//! frame; [`BlockDecomposition::from_rotated`] maps them back to the site
//! basis of the [`HilbertLayout`](crate::operators::HilbertLayout).

mod basis;
mod criterion;
mod decomposition;
mod expansion;
mod gamma;
mod inverse;
mod singular;

pub use criterion::{check_criterion, check_model_criterion, CriterionReport};
pub use decomposition::{block_decompose, block_decompose_with_criterion, BlockDecomposition};
pub use expansion::{expansion_terms, m1_closed_form, ExpansionTerms};
pub use gamma::{gamma_ch, gamma_ch_fit, GammaChReport};
pub use inverse::{dissipator_inverse, DissipatorInverse};
pub use singular::{singularity_scan, GershgorinClass, SingularityScan};

/// `|λ_α − λ_0| ≤ DEGENERACY_TOL · ‖h_00‖_F` marks a pole of `Λ`.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// `σ_min / σ_max ≤ K_SINGULAR_TOL` marks a singular `K`.
pub const K_SINGULAR_TOL: f64 = 1e-10;
/// Default tolerance for [`check_criterion`].
pub const CRITERION_TOL: f64 = 1e-9;
