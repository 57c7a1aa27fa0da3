use super::basis::complete_basis;
use super::criterion::CriterionReport;
use crate::error::{Error, Result};
use crate::operators::{hermitian_eig, kron, ComplexMatrix, HilbertLayout, PureState, C64};

/// Blocks `h_jk = ⟨e^j|H|e^k⟩` expressed in the eigenbasis `{|α⟩}` of
/// `h_00`, with `|0⟩ = ψ_target`.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub d0: usize,
    pub d1: usize,
    /// `h[j][k]`, each `d1×d1`.
    pub h: Vec<Vec<ComplexMatrix>>,
    /// Eigenvalues of `h_00`; `lambda[0]` belongs to the target.
    pub lambda: Vec<f64>,
    /// Columns are `|α⟩` in the `H_1` factor basis.
    pub alpha_basis: ComplexMatrix,
    /// Columns are `|e^j⟩` in the `H_0` factor basis.
    pub e_basis: ComplexMatrix,
    pub layout: HilbertLayout,
    /// `H` in block order in the rotated frame.
    pub h_rotated: ComplexMatrix,
}

/// [`block_decompose_with_criterion`] without a criterion report: `|e¹⟩`
/// comes from the Gram–Schmidt completion of `ψ_Zeno`.
pub fn block_decompose(
    h: &ComplexMatrix,
    psi_zeno: &PureState,
    psi_target: &PureState,
    layout: &HilbertLayout,
) -> Result<BlockDecomposition> {
    decompose(h, psi_zeno, psi_target, layout, None)
}

/// Block decomposition with `|e¹⟩ = ψ_Zeno^⊥` taken from the report.
pub fn block_decompose_with_criterion(
    h: &ComplexMatrix,
    psi_zeno: &PureState,
    psi_target: &PureState,
    layout: &HilbertLayout,
    criterion: &CriterionReport,
) -> Result<BlockDecomposition> {
    decompose(h, psi_zeno, psi_target, layout, Some(criterion))
}

fn decompose(
    h: &ComplexMatrix,
    psi_zeno: &PureState,
    psi_target: &PureState,
    layout: &HilbertLayout,
    criterion: Option<&CriterionReport>,
) -> Result<BlockDecomposition> {
    let (d0, d1) = (layout.d0(), layout.d1());
    if psi_zeno.dim() != d0 || psi_target.dim() != d1 {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {} for layout {d0}x{d1}",
            psi_zeno.dim(),
            psi_target.dim()
        )));
    }
    if !h.is_hermitian(1e-10) {
        return Err(Error::InvalidArgument("Hamiltonian is not Hermitian".into()));
    }
    let hb = layout.to_block_order(h)?;

    let mut first = vec![psi_zeno.amplitudes().to_vec()];
    if let Some(c) = criterion {
        if d0 > 1 {
            first.push(c.zeno_perp.amplitudes().to_vec());
        }
    }
    let e_basis = complete_basis(&first, d0);

    // h_00 in the factor basis of H_1
    let z = psi_zeno.amplitudes();
    let h00 = ComplexMatrix::from_fn(d1, d1, |a, b| {
        let mut s = C64::new(0.0, 0.0);
        for e in 0..d0 {
            for f in 0..d0 {
                s += z[e].conj() * hb[(e * d1 + a, f * d1 + b)] * z[f];
            }
        }
        s
    });
    let t = psi_target.amplitudes();
    let ht = h00.apply(t)?;
    let l0: f64 = t.iter().zip(&ht).map(|(a, b)| a.conj() * b).sum::<C64>().re;
    let residual = ht
        .iter()
        .zip(t)
        .map(|(a, b)| (a - b * l0).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > 1e-9 * h.norm_fro().max(1.0) {
        return Err(Error::TargetNotEigenvector { residual });
    }

    // eigenbasis of h_00 on the complement of the target, ascending
    let comp_full = complete_basis(&[t.to_vec()], d1);
    let comp = ComplexMatrix::from_fn(d1, d1 - 1, |i, j| comp_full[(i, j + 1)]);
    let hc = (&(&comp.dagger() * &h00) * &comp).hermitian_part();
    let (w, v) = hermitian_eig(&hc)?;
    let rest = &comp * &v;
    let alpha_basis = ComplexMatrix::from_fn(d1, d1, |i, j| if j == 0 { t[i] } else { rest[(i, j - 1)] });
    let mut lambda = vec![l0];
    lambda.extend(w);

    let u = kron(&e_basis, &alpha_basis);
    let h_rotated = (&(&u.dagger() * &hb) * &u).hermitian_part();
    let h_blocks = (0..d0)
        .map(|j| (0..d0).map(|k| sub_block(&h_rotated, d1, j, k)).collect())
        .collect();
    Ok(BlockDecomposition {
        d0,
        d1,
        h: h_blocks,
        lambda,
        alpha_basis,
        e_basis,
        layout: layout.clone(),
        h_rotated,
    })
}

pub(crate) fn sub_block(m: &ComplexMatrix, d1: usize, j: usize, k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d1, d1, |a, b| m[(j * d1 + a, k * d1 + b)])
}

impl BlockDecomposition {
    pub fn block(&self, j: usize, k: usize) -> &ComplexMatrix {
        &self.h[j][k]
    }

    pub fn alpha(&self, index: usize) -> PureState {
        PureState::normalized(self.alpha_basis.col(index)).expect("unit column")
    }

    /// `U = U_0 ⊗ U_1` in block order.
    pub fn rotation(&self) -> ComplexMatrix {
        kron(&self.e_basis, &self.alpha_basis)
    }

    /// Site-basis operator to the rotated block frame.
    pub fn to_rotated(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let u = self.rotation();
        Ok(&(&u.dagger() * &self.layout.to_block_order(x)?) * &u)
    }

    /// Rotated block-frame operator back to the site basis.
    pub fn from_rotated(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        let u = self.rotation();
        self.layout.from_block_order(&(&(&u * y) * &u.dagger()))
    }

    /// `Λ = Σ_{α>0} |α⟩⟨α| / (λ_α − λ_0)` in the α basis; `None` at a pole.
    pub fn lambda_resolvent(&self, tol: f64) -> Option<ComplexMatrix> {
        let scale = self.h00_norm();
        let l0 = self.lambda[0];
        let mut diag = vec![C64::new(0.0, 0.0); self.d1];
        for a in 1..self.d1 {
            let gap = self.lambda[a] - l0;
            if gap.abs() <= tol * scale {
                return None;
            }
            diag[a] = C64::new(1.0 / gap, 0.0);
        }
        Some(ComplexMatrix::from_diag(&diag))
    }

    pub(crate) fn h00_norm(&self) -> f64 {
        self.h[0][0].norm_fro().max(f64::MIN_POSITIVE)
    }
}
