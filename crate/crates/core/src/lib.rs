//! Dissipative targeting of pure states in the strong-dissipation (Zeno) limit.
//!
//! The crate is organised bottom-up:
//!
//! * [`operators`]: dense complex matrices, tensor-product bookkeeping and
//!   the elementary spin-1/2 operators.
//! * [`liouville`]: the Lindblad generator, its steady state and spectrum.
//! * [`zeno`]: block decomposition of the Hamiltonian, the targeting
//!   criterion, the dissipator inverse, the `1/Γ` expansion of the steady
//!   state and the characteristic dissipative strength `Γ_ch`.
//! * [`models`]: the Bell, minimal `N+1`-qubit and spin-helix models with
//!   their closed forms.
//! * [`cli`]: configuration, parameter sweeps and report output used by the
//!   `zeno` binary.

pub mod cli;
pub mod error;
pub mod liouville;
pub mod models;
pub mod operators;
pub mod zeno;

pub use error::{Error, Result};
pub use liouville::{LindbladModel, NessResult, SpectrumResult};
pub use models::TargetedModel;
pub use operators::{ComplexMatrix, HilbertLayout, PureState, C64};
