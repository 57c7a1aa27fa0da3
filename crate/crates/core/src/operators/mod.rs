//! Dense complex linear algebra and tensor-product bookkeeping.

mod layout;
mod linalg;
mod matrix;
mod ops;
mod state;

pub use layout::HilbertLayout;
pub use linalg::{
    determinant, general_eig, general_eigenvalues, hermitian_eig, null_space, pseudo_solve,
    pseudo_solve_with, pseudoinverse, singular_values, solve,
};
pub use matrix::{ComplexMatrix, DEFAULT_TOL};
pub use ops::{
    embed, jordan_block, kron, kron_all, local_polarizer, partial_trace_h0, sigma_minus,
    sigma_plus, sigma_x, sigma_y, sigma_z, spinor,
};
pub use state::PureState;

pub type C64 = num_complex::Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}
