use super::{c, re, ComplexMatrix, HilbertLayout, PureState, C64};
use crate::error::{Error, Result};

/// Kronecker product; the left factor is the slow index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Left-to-right Kronecker product of all factors; `1×1` identity if empty.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// `tr_{H_0} x` as a `d1×d1` matrix.
pub fn partial_trace_h0(x: &ComplexMatrix, layout: &HilbertLayout) -> Result<ComplexMatrix> {
    if x.rows() != layout.dim() || x.cols() != layout.dim() {
        return Err(Error::DimensionMismatch(format!(
            "partial trace of a {}x{} matrix in a layout of dimension {}",
            x.rows(),
            x.cols(),
            layout.dim()
        )));
    }
    let d1 = layout.d1();
    Ok(ComplexMatrix::from_fn(d1, d1, |a, b| {
        (0..layout.d0())
            .map(|e| x[(layout.index(e, a), layout.index(e, b))])
            .sum()
    }))
}

/// Nilpotent Jordan block with ones on the first superdiagonal.
pub fn jordan_block(d0: usize) -> Result<ComplexMatrix> {
    if d0 < 2 {
        return Err(Error::InvalidArgument(format!("Jordan block needs d0 >= 2, got {d0}")));
    }
    Ok(ComplexMatrix::from_fn(d0, d0, |i, j| {
        if j == i + 1 {
            re(1.0)
        } else {
            re(0.0)
        }
    }))
}

/// `(cos(θ/2) e^{−iφ/2}, sin(θ/2) e^{iφ/2})`.
pub fn spinor(theta: f64, phi: f64) -> PureState {
    let (s, co) = (0.5 * theta).sin_cos();
    let amplitudes = vec![
        C64::from_polar(co, -0.5 * phi),
        C64::from_polar(s, 0.5 * phi),
    ];
    PureState::normalized(amplitudes).expect("spinor has unit norm")
}

/// `u σ⁺ u†` with `u|↑⟩ = spinor(θ, φ)`; its only dark state is that spinor.
pub fn local_polarizer(theta: f64, phi: f64) -> ComplexMatrix {
    let s = spinor(theta, phi);
    let s = s.amplitudes();
    let perp = [-s[1].conj(), s[0].conj()];
    let u = ComplexMatrix::from_fn(2, 2, |i, j| if j == 0 { s[i] } else { perp[i] });
    &(&u * &sigma_plus()) * &u.dagger()
}

/// `op` on factor `site`, identity elsewhere.
pub fn embed(op: &ComplexMatrix, site: usize, layout: &HilbertLayout) -> Result<ComplexMatrix> {
    let dims = layout.factor_dims();
    if site >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "site {site} out of range for {} factors",
            dims.len()
        )));
    }
    if op.rows() != dims[site] || op.cols() != dims[site] {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, factor {site} has dimension {}",
            op.rows(),
            op.cols(),
            dims[site]
        )));
    }
    let left: usize = dims[..site].iter().product();
    let right: usize = dims[site + 1..].iter().product();
    Ok(kron(
        &kron(&ComplexMatrix::identity(left), op),
        &ComplexMatrix::identity(right),
    ))
}

/// `|↑⟩⟨↓|` with `|↑⟩` the first basis vector.
pub fn sigma_plus() -> ComplexMatrix {
    jordan_block(2).expect("d0 = 2")
}

pub fn sigma_minus() -> ComplexMatrix {
    sigma_plus().transpose()
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("2x2")
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
        .expect("2x2")
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}
