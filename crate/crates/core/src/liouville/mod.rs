//! Lindblad generator, steady state, spectrum and state observables.
//!
//! Superoperators act on the column-major flattening of density matrices,
//! `vec[i + j·d] = ρ[(i, j)]`, as produced by [`ComplexMatrix::vectorize`].

mod model;
mod observables;
mod steady;

pub use model::{apply_dissipator, apply_generator, liouvillian_matrix, LindbladModel};
pub use observables::{fidelity, purity_deficit, reduced_fidelity, trace_distance};
pub use steady::{ness, ness_with, spectrum, NessMethod, NessResult, SpectrumResult};

#[cfg(doc)]
use crate::operators::ComplexMatrix;
