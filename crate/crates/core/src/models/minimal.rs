use super::TargetedModel;
use crate::error::{Error, Result};
use crate::liouville::LindbladModel;
use crate::operators::{embed, kron, re, sigma_plus, ComplexMatrix, HilbertLayout, PureState, C64, I};

/// Parameters of the minimal `N+1`-qubit model.
#[derive(Clone, Debug)]
pub struct MinimalModelParams {
    /// Qubits of the target register.
    pub n: usize,
    /// `λ_α`, `α = 0..2ᴺ`.
    pub lambda: Vec<f64>,
    pub kappa: C64,
    /// `η_α`, `α = 0..2ᴺ−1`.
    pub eta: Vec<C64>,
    /// `d_α`, `α = 0..2ᴺ`.
    pub d: Vec<f64>,
    /// `(α, β, d_αβ)` with `1 ≤ α < β ≤ 2ᴺ−2`.
    pub d_offdiag: Vec<(usize, usize, C64)>,
    /// Unitary on `H_1` whose first column is the target; identity if unset.
    pub relabel: Option<ComplexMatrix>,
}

impl MinimalModelParams {
    /// `λ_α = 1 + α + √α`, `κ = η_α = 1`, `d_α = d_αβ = 0`.
    pub fn fig4(n: usize) -> Self {
        let dim = 1usize << n;
        Self {
            n,
            lambda: (0..dim).map(|a| 1.0 + a as f64 + (a as f64).sqrt()).collect(),
            kappa: re(1.0),
            eta: vec![re(1.0); dim - 1],
            d: vec![0.0; dim],
            d_offdiag: Vec::new(),
            relabel: None,
        }
    }

    pub fn dim1(&self) -> usize {
        1usize << self.n
    }

    pub fn validate(&self) -> Result<()> {
        let d1 = self.dim1();
        if self.n == 0 {
            return Err(Error::InvalidArgument("target register needs n >= 1".into()));
        }
        if self.lambda.len() != d1 || self.d.len() != d1 || self.eta.len() != d1 - 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {d1} lambda, {d1} d and {} eta values",
                d1 - 1
            )));
        }
        if self.kappa.norm() == 0.0 {
            return Err(Error::InvalidArgument("kappa must be nonzero".into()));
        }
        if let Some(a) = self.eta.iter().position(|e| e.norm() == 0.0) {
            return Err(Error::InvalidArgument(format!("eta_{a} must be nonzero")));
        }
        for &(a, b, _) in &self.d_offdiag {
            if !(1 <= a && a < b && b + 2 <= d1) {
                return Err(Error::InvalidArgument(format!("d_({a},{b}) outside 1 <= a < b <= {}", d1 - 2)));
            }
        }
        if let Some(u) = &self.relabel {
            if u.rows() != d1 || u.cols() != d1 || (&(&u.dagger() * u) - &ComplexMatrix::identity(d1)).norm_fro() > 1e-10 {
                return Err(Error::InvalidArgument("relabel must be a unitary on H_1".into()));
            }
        }
        Ok(())
    }

    fn relabel_op(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match &self.relabel {
            None => x.clone(),
            Some(u) => {
                let w = kron(&ComplexMatrix::identity(2), u);
                &(&w * x) * &w.dagger()
            }
        }
    }
}

/// `(N+1)` qubits with `L = σ⁺` on the first, targeting `|0⟩` of the
/// register. Full-space index `e · 2ᴺ + α`. Γ = 1.
pub fn minimal_model(p: &MinimalModelParams) -> Result<TargetedModel> {
    p.validate()?;
    let d1 = p.dim1();
    let idx = |e: usize, a: usize| e * d1 + a;
    let mut h = ComplexMatrix::zeros(2 * d1, 2 * d1);
    for a in 0..d1 {
        h[(idx(0, a), idx(0, a))] += re(p.lambda[a]);
        h[(idx(1, a), idx(1, a))] += re(p.d[a]);
    }
    h[(idx(0, 0), idx(1, 0))] += p.kappa;
    h[(idx(1, 0), idx(0, 0))] += p.kappa.conj();
    for (a, &eta) in p.eta.iter().enumerate() {
        h[(idx(0, a + 1), idx(1, a))] += eta;
        h[(idx(1, a), idx(0, a + 1))] += eta.conj();
    }
    for &(a, b, v) in &p.d_offdiag {
        h[(idx(1, a), idx(1, b))] += v;
        h[(idx(1, b), idx(1, a))] += v.conj();
    }
    let h = p.relabel_op(&h);
    let layout = HilbertLayout::qubits(p.n + 1, vec![0])?;
    let l = embed(&sigma_plus(), 0, &layout)?;
    let model = LindbladModel::new(h, vec![l], 1.0, layout)?;
    let target = match &p.relabel {
        None => PureState::basis(d1, 0),
        Some(u) => PureState::normalized(u.col(0))?,
    };
    TargetedModel::new(format!("minimal(n={})", p.n), model, PureState::basis(2, 0), target)
}

/// Closed-form steady state of the minimal model.
#[derive(Clone, Debug)]
pub struct MinimalClosedForm {
    pub rho: ComplexMatrix,
    pub zeta: f64,
    /// `√8 |κ|² / |λ_0 − λ_1|`.
    pub gamma_ch: f64,
    /// `2√ζ / |λ_0 − λ_1|`.
    pub gamma_cr: f64,
    pub fidelity: f64,
}

/// Evaluates the summed closed form at `gamma`.
pub fn minimal_closed_ness(p: &MinimalModelParams, gamma: f64) -> Result<MinimalClosedForm> {
    p.validate()?;
    let (l0, l1) = (p.lambda[0], p.lambda[1]);
    let dl = l0 - l1;
    if dl == 0.0 {
        return Err(Error::InvalidArgument("lambda_0 = lambda_1".into()));
    }
    let d1 = p.dim1();
    let (kappa, eta0, dd0) = (p.kappa, p.eta[0], p.d[0]);
    let k2 = kappa.norm_sqr();
    let e2 = eta0.norm_sqr();
    let zeta = (l0 * l0 - l0 * l1 - e2 - dd0 * dl).powi(2) + k2 * (k2 + 2.0 * (dl * dl + e2));

    let n = 2 * d1;
    let ket = |e: usize, a: usize| e * d1 + a;
    let op = |m: &mut ComplexMatrix, i: usize, j: usize, v: C64| m[(i, j)] += v;

    let mut r1 = ComplexMatrix::zeros(n, n);
    op(&mut r1, ket(0, 0), ket(0, 1), I * 2.0 * kappa * eta0.conj() / dl);
    op(&mut r1, ket(0, 0), ket(1, 0), I * 2.0 * kappa);
    let r1 = &r1 + &r1.dagger();

    let mut a = ComplexMatrix::zeros(n, n);
    op(&mut a, ket(0, 0), ket(0, 0), re(-4.0 * k2 * (k2 + e2 + dl * dl) / (dl * dl)));
    op(&mut a, ket(0, 1), ket(0, 1), re(4.0 * k2 * (k2 + e2) / (dl * dl)));
    op(&mut a, ket(1, 0), ket(1, 0), re(4.0 * k2));
    let mut b = ComplexMatrix::zeros(n, n);
    let c0 = l0 * l0 - e2 - l0 * l1 - dd0 * dl;
    op(&mut b, ket(0, 0), ket(0, 1), kappa * eta0.conj() * 4.0 * (c0 - k2) / (dl * dl));
    op(&mut b, ket(0, 1), ket(1, 0), kappa * kappa.conj() * eta0 * 4.0 / dl);
    op(&mut b, ket(0, 0), ket(1, 0), kappa * 4.0 * c0 / dl);
    let r2 = &(&a + &b) + &b.dagger();

    let w = dl * dl / (4.0 * zeta + dl * dl * gamma * gamma);
    let mut rho = ComplexMatrix::zeros(n, n);
    rho[(0, 0)] = re(1.0);
    rho += &(&r1.scale_real(gamma) + &r2).scale_real(w);
    let rho = p.relabel_op(&rho);

    let fidelity = (1.0 - 4.0 * k2 * (dl * dl + k2 + e2) / (4.0 * zeta + dl * dl * gamma * gamma)).sqrt();
    Ok(MinimalClosedForm {
        rho,
        zeta,
        gamma_ch: 8f64.sqrt() * k2 / dl.abs(),
        gamma_cr: 2.0 * zeta.sqrt() / dl.abs(),
        fidelity,
    })
}
