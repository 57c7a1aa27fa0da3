use serde::Serialize;

use super::basis::complete_basis;
use crate::error::Result;
use crate::liouville::LindbladModel;
use crate::operators::{ComplexMatrix, HilbertLayout, PureState, C64};

/// Decomposition of `H|Ψ⟩` for `|Ψ⟩ = ψ_Zeno ⊗ ψ_target`.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    /// Residual small and `|κ|` above tolerance.
    pub satisfied: bool,
    /// `⟨Ψ|H|Ψ⟩`.
    pub lambda: f64,
    /// `⟨ψ_Zeno^⊥ ⊗ ψ_target|H|Ψ⟩`; real and nonnegative by the choice of
    /// `ψ_Zeno^⊥`.
    #[serde(serialize_with = "ser_c64")]
    pub kappa: C64,
    /// Norm of the part of `H|Ψ⟩` outside `span{|Ψ⟩, |ψ_Zeno^⊥⟩ ⊗ |ψ_target⟩}`.
    pub residual_norm: f64,
    /// `H|Ψ⟩ = λ|Ψ⟩` within tolerance.
    pub eigenstate: bool,
    /// Every jump operator annihilates `|Ψ⟩`; only known for model checks.
    pub dark: Option<bool>,
    /// `H|Ψ⟩ = λ|Ψ⟩` and `L|Ψ⟩ = 0`.
    pub strong_criterion: bool,
    #[serde(skip)]
    pub zeno_perp: PureState,
    pub tol: f64,
    /// `‖H‖_F`, the scale of the residual test.
    pub h_norm: f64,
}

fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

impl CriterionReport {
    /// `κ = 0` while `H|Ψ⟩ = λ|Ψ⟩`: the target is an exact dark eigenstate.
    pub fn is_trivial(&self) -> bool {
        self.eigenstate && !self.satisfied
    }
}

/// Evaluates the targeting criterion. `satisfied` holds iff
/// `residual_norm ≤ tol · ‖H‖_F` and `|κ| > tol`.
pub fn check_criterion(
    h: &ComplexMatrix,
    psi_zeno: &PureState,
    psi_target: &PureState,
    layout: &HilbertLayout,
    tol: f64,
) -> Result<CriterionReport> {
    let (d0, d1) = (layout.d0(), layout.d1());
    let psi = layout.product(psi_zeno.amplitudes(), psi_target.amplitudes())?;
    let hpsi = h.apply(&psi)?;
    let lambda = psi
        .iter()
        .zip(&hpsi)
        .map(|(a, b)| a.conj() * b)
        .sum::<C64>()
        .re;
    let r: Vec<C64> = hpsi.iter().zip(&psi).map(|(a, b)| a - b * lambda).collect();
    let rb = layout.vector_to_block_order(&r)?;
    let z = psi_zeno.amplitudes();
    let t = psi_target.amplitudes();

    // component of r of the form |v⟩ ⊗ ψ_target
    let mut v: Vec<C64> = (0..d0)
        .map(|e| (0..d1).map(|a| rb[e * d1 + a] * t[a].conj()).sum())
        .collect();
    let ov: C64 = z.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
    for (x, zi) in v.iter_mut().zip(z) {
        *x -= ov * zi;
    }
    let kappa = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let h_norm = h.norm_fro();
    let zeno_perp = if kappa > f64::EPSILON * h_norm.max(1.0) {
        PureState::normalized(v).expect("nonzero")
    } else {
        let u = complete_basis(&[z.to_vec()], d0);
        PureState::normalized(u.col(1.min(d0 - 1))).expect("unit column")
    };
    let p = zeno_perp.amplitudes();
    let mut res2 = 0.0;
    for e in 0..d0 {
        for a in 0..d1 {
            res2 += (rb[e * d1 + a] - p[e] * t[a] * kappa).norm_sqr();
        }
    }
    let residual_norm = res2.sqrt();
    let r_norm = rb.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let eigenstate = r_norm <= tol * h_norm;
    Ok(CriterionReport {
        satisfied: residual_norm <= tol * h_norm && kappa > tol,
        lambda,
        kappa: C64::new(kappa, 0.0),
        residual_norm,
        eigenstate,
        dark: None,
        strong_criterion: eigenstate,
        zeno_perp,
        tol,
        h_norm,
    })
}

/// [`check_criterion`] on a model's Hamiltonian, also testing `L|Ψ⟩ = 0`
/// for every jump operator.
pub fn check_model_criterion(
    model: &LindbladModel,
    psi_zeno: &PureState,
    psi_target: &PureState,
    tol: f64,
) -> Result<CriterionReport> {
    let layout = model.layout();
    let mut rep = check_criterion(model.hamiltonian(), psi_zeno, psi_target, layout, tol)?;
    let psi = layout.product(psi_zeno.amplitudes(), psi_target.amplitudes())?;
    let mut dark = true;
    for l in model.jumps() {
        let lpsi = l.apply(&psi)?;
        let n = lpsi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        dark &= n <= tol * l.norm_fro().max(1.0);
    }
    rep.dark = Some(dark);
    rep.strong_criterion = rep.eigenstate && dark;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::re;

    #[test]
    fn multiple_of_identity_is_trivial() {
        let layout = HilbertLayout::bipartite(2, 2).unwrap();
        let h = ComplexMatrix::identity(4).scale_real(2.5);
        let rep = check_criterion(&h, &PureState::basis(2, 0), &PureState::basis(2, 0), &layout, 1e-9).unwrap();
        assert!((rep.lambda - 2.5).abs() < 1e-15);
        assert_eq!(rep.kappa, re(0.0));
        assert!(rep.strong_criterion);
        assert!(!rep.satisfied);
        assert!(rep.is_trivial());
    }

    #[test]
    fn perpendicular_is_orthogonal() {
        let layout = HilbertLayout::bipartite(2, 2).unwrap();
        // couples |e0 0⟩ to |e1 0⟩
        let mut h = ComplexMatrix::zeros(4, 4);
        h[(0, 2)] = re(0.3);
        h[(2, 0)] = re(0.3);
        let z = PureState::basis(2, 0);
        let rep = check_criterion(&h, &z, &PureState::basis(2, 0), &layout, 1e-9).unwrap();
        assert!(rep.satisfied);
        assert!((rep.kappa.re - 0.3).abs() < 1e-15);
        assert!(rep.zeno_perp.inner(&z).norm() < 1e-15);
    }
}
