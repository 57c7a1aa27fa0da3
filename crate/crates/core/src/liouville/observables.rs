use crate::error::{Error, Result};
use crate::operators::{hermitian_eig, partial_trace_h0, ComplexMatrix, HilbertLayout, PureState};

/// `1 − tr ρ²`.
pub fn purity_deficit(rho: &ComplexMatrix) -> f64 {
    let n = rho.rows();
    let mut tr2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            tr2 += (rho[(i, j)] * rho[(j, i)]).re;
        }
    }
    1.0 - tr2
}

/// `√⟨ψ|ρ|ψ⟩`.
pub fn fidelity(rho: &ComplexMatrix, target: &PureState) -> Result<f64> {
    if rho.rows() != target.dim() || rho.cols() != target.dim() {
        return Err(Error::DimensionMismatch(format!(
            "density matrix {}x{} vs state of dimension {}",
            rho.rows(),
            rho.cols(),
            target.dim()
        )));
    }
    Ok(target.expectation(rho)?.re.max(0.0).sqrt())
}

/// Fidelity of `tr_{H_0} ρ` with a target in `H_1`.
pub fn reduced_fidelity(rho: &ComplexMatrix, target: &PureState, layout: &HilbertLayout) -> Result<f64> {
    fidelity(&partial_trace_h0(rho, layout)?, target)
}

/// `½ ‖a − b‖₁` for Hermitian `a`, `b`.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_same_shape(b, "trace_distance")?;
    let (w, _) = hermitian_eig(&(a - b).hermitian_part())?;
    Ok(0.5 * w.iter().map(|x| x.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_state_values() {
        let rho = ComplexMatrix::identity(4).scale_real(0.25);
        assert!((purity_deficit(&rho) - 0.75).abs() < 1e-15);
        assert!((fidelity(&rho, &PureState::basis(4, 2)).unwrap() - 0.5).abs() < 1e-15);
        let p = PureState::basis(4, 1).projector();
        assert!(purity_deficit(&p).abs() < 1e-15);
        assert!((trace_distance(&p, &rho).unwrap() - 0.75).abs() < 1e-14);
    }
}
