use super::TargetedModel;
use crate::error::{Error, Result};
use crate::liouville::LindbladModel;
use crate::operators::{embed, local_polarizer, sigma_x, sigma_y, sigma_z, spinor, ComplexMatrix, HilbertLayout, PureState};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HelixParams {
    /// Chain length, at least 3.
    pub n: usize,
    pub theta: f64,
    /// Polar increment γ; site `k` (from 0) has `φ_k = γ k`.
    pub gamma_twist: f64,
}

impl HelixParams {
    /// `Δ = cos γ`.
    pub fn anisotropy(&self) -> f64 {
        self.gamma_twist.cos()
    }

    pub fn phi(&self, site: usize) -> f64 {
        self.gamma_twist * site as f64
    }
}

/// `⊗_{k ∈ sites} spinor(θ, γ k)`.
pub fn helix_state(p: &HelixParams, sites: std::ops::Range<usize>) -> PureState {
    sites.fold(PureState::basis(1, 0), |acc, k| acc.tensor(&spinor(p.theta, p.phi(k))))
}

/// XXZ chain `Σ_j (σˣσˣ + σʸσʸ + Δ σᶻσᶻ)` with polarizing boundary jumps
/// whose dark states are the helix spinors of sites 1 and N. `H_0` is the
/// pair of boundary sites; the target is the interior helix. Γ = 1.
pub fn helix_model(p: &HelixParams) -> Result<TargetedModel> {
    let n = p.n;
    if n < 3 {
        return Err(Error::InvalidArgument(format!("helix needs n >= 3, got {n}")));
    }
    if n == 3 {
        log::warn!("helix with n = 3: both boundary jumps touch the single interior site");
    }
    let layout = HilbertLayout::qubits(n, vec![0, n - 1])?;
    let dim = layout.dim();
    let delta = p.anisotropy();
    let mut h = ComplexMatrix::zeros(dim, dim);
    for j in 0..n - 1 {
        for (op, w) in [(sigma_x(), 1.0), (sigma_y(), 1.0), (sigma_z(), delta)] {
            let a = embed(&op, j, &layout)?;
            let b = embed(&op, j + 1, &layout)?;
            h += &(&a * &b).scale_real(w);
        }
    }
    let h = h.hermitian_part();
    let last = p.phi(n - 1);
    let jumps = vec![
        embed(&local_polarizer(p.theta, 0.0), 0, &layout)?,
        embed(&local_polarizer(p.theta, last), n - 1, &layout)?,
    ];
    let model = LindbladModel::new(h, jumps, 1.0, layout)?;
    let zeno = spinor(p.theta, 0.0).tensor(&spinor(p.theta, last));
    let target = helix_state(p, 1..n - 1);
    TargetedModel::new(
        format!("helix(n={n}, theta={}, gamma={})", p.theta, p.gamma_twist),
        model,
        zeno,
        target,
    )
}
