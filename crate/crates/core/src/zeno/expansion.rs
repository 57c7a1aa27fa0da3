use super::criterion::CriterionReport;
use super::decomposition::BlockDecomposition;
use super::inverse::DissipatorInverse;
use super::singular::singularity_scan;
use super::DEGENERACY_TOL;
use crate::error::{Error, Result};
use crate::liouville::LindbladModel;
use crate::operators::{null_space, pseudoinverse, singular_values, ComplexMatrix, C64, I};

const SECULAR_TOL: f64 = 1e-8;
/// Kernel blocks solved for at first; the highest ones are only partially
/// constrained and are not reported.
const MIN_ORDERS: usize = 3;
/// Further secular conditions are added up to this order when the first
/// two kernel blocks are not yet pinned down.
const MAX_ORDERS: usize = 6;

/// `ρ_NESS = ρ⁽⁰⁾ + ρ⁽¹⁾/Γ + ρ⁽²⁾/Γ² + …`, in the site basis.
#[derive(Clone, Debug)]
pub struct ExpansionTerms {
    pub rho0: ComplexMatrix,
    pub rho1: ComplexMatrix,
    pub rho2: ComplexMatrix,
    /// Kernel blocks `M⁽¹⁾`, `M⁽²⁾` in the α basis (`d1×d1`).
    pub m1: ComplexMatrix,
    pub m2: ComplexMatrix,
    /// `q_α = M⁽²⁾_αα − M⁽¹⁾_α0 M⁽¹⁾_0α` for `α ≥ 1`.
    pub q: Vec<f64>,
    /// `μ_α = M⁽¹⁾_αα` for `α ≥ 1`.
    pub mu: Vec<f64>,
    /// `max |tr_{H_0}[H, ρ⁽ᵐ⁾]|` for `m = 0, 1, 2`.
    pub secular_residuals: [f64; 3],
    /// `ρ⁽⁰⁾, ρ⁽¹⁾, ρ⁽²⁾` in the rotated block frame.
    pub rotated: [ComplexMatrix; 3],
}

impl ExpansionTerms {
    /// `ρ⁽⁰⁾ + ρ⁽¹⁾/Γ + ρ⁽²⁾/Γ²`.
    pub fn truncated(&self, gamma: f64) -> ComplexMatrix {
        let mut r = self.rho0.clone();
        r += &self.rho1.scale_real(1.0 / gamma);
        r += &self.rho2.scale_real(1.0 / (gamma * gamma));
        r
    }

    /// `−tr(ρ⁽¹⁾²) − 2 tr(ρ⁽⁰⁾ρ⁽²⁾)`, the `Γ⁻²` coefficient of `1 − tr ρ²`.
    pub fn purity_coefficient(&self) -> f64 {
        let [r0, r1, r2] = &self.rotated;
        let t11 = (r1 * r1).trace().re;
        let t02 = (r0 * r2).trace().re;
        -t11 - 2.0 * t02
    }

    /// `−2 Σ_{α≥1} |M⁽¹⁾_0α|² − 2 M⁽²⁾_00`.
    pub fn purity_coefficient_from_kernel(&self) -> f64 {
        let d1 = self.m1.rows();
        let s: f64 = (1..d1).map(|a| self.m1[(0, a)].norm_sqr()).sum();
        -2.0 * s - 2.0 * self.m2[(0, 0)].re
    }
}

fn partial_trace_block(x: &ComplexMatrix, d0: usize, d1: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d1, d1, |a, b| (0..d0).map(|e| x[(e * d1 + a, e * d1 + b)]).sum())
}

struct Recursion<'a> {
    h: &'a ComplexMatrix,
    dinv: &'a DissipatorInverse,
    d0: usize,
    d1: usize,
    orders: usize,
}

impl Recursion<'_> {
    fn rho0(&self) -> ComplexMatrix {
        let n = self.d0 * self.d1;
        let mut r = ComplexMatrix::zeros(n, n);
        r[(0, 0)] = C64::new(1.0, 0.0);
        r
    }

    /// `ρ⁽ᵐ⁺¹⁾ = D⁻¹(i[H, ρ⁽ᵐ⁾]) + |e⁰⟩⟨e⁰| ⊗ m⁽ᵐ⁺¹⁾` for the given kernel
    /// blocks, which are packed row-major, `d1²` entries per order.
    fn run(&self, x: &[C64]) -> Vec<ComplexMatrix> {
        let d1 = self.d1;
        let nk = d1 * d1;
        let mut rhos = vec![self.rho0()];
        for m in 0..self.orders {
            let c = self.h.commutator(&rhos[m]).expect("square").scale(I);
            let mut y = self.dinv.inverse_unchecked(&c);
            for a in 0..d1 {
                for b in 0..d1 {
                    y[(a, b)] += x[m * nk + a * d1 + b];
                }
            }
            rhos.push(y);
        }
        rhos
    }

    /// Stacked secular conditions `tr_{H_0}[H, ρ⁽ᵐ⁾]` and `tr ρ⁽ᵐ⁾` for
    /// `m = 1..=orders`.
    fn conditions(&self, rhos: &[ComplexMatrix]) -> Vec<C64> {
        let mut out = Vec::new();
        for r in &rhos[1..] {
            let c = self.h.commutator(r).expect("square");
            out.extend(partial_trace_block(&c, self.d0, self.d1).into_vec());
            out.push(r.trace());
        }
        out
    }

    fn secular_defect(&self, r: &ComplexMatrix) -> f64 {
        let c = self.h.commutator(r).expect("square");
        partial_trace_block(&c, self.d0, self.d1).max_abs()
    }
}

fn rec_base<'a>(h: &'a ComplexMatrix, dinv: &'a DissipatorInverse, d0: usize, d1: usize) -> Recursion<'a> {
    Recursion {
        h,
        dinv,
        d0,
        d1,
        orders: MIN_ORDERS,
    }
}

/// Solves the stacked secular conditions for the packed kernel blocks.
///
/// Returns `None` when the first two blocks are not uniquely determined at
/// this depth of the hierarchy, and an error when the system is
/// inconsistent.
fn solve_kernels(rec: &Recursion<'_>) -> Result<Option<Vec<C64>>> {
    let nk = rec.d1 * rec.d1;
    let nx = rec.orders * nk;
    let zeros = vec![C64::new(0.0, 0.0); nx];
    let b = rec.conditions(&rec.run(&zeros));
    let neq = b.len();
    let mut a = ComplexMatrix::zeros(neq, nx);
    let mut col_scale = vec![1.0; nx];
    for j in 0..nx {
        let mut x = zeros.clone();
        x[j] = C64::new(1.0, 0.0);
        let cj = rec.conditions(&rec.run(&x));
        let col: Vec<C64> = cj.iter().zip(&b).map(|(p, q)| p - q).collect();
        let n = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        col_scale[j] = if n > 0.0 { 1.0 / n } else { 1.0 };
        for i in 0..neq {
            a[(i, j)] = col[i] * col_scale[j];
        }
    }

    let sv = singular_values(&a)?;
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > 1e-10 * smax).count();
    if rank < nx {
        let ns = null_space(&a, 1e-10)?;
        for k in 0..ns.cols() {
            let weight: f64 = (0..2 * nk).map(|i| ns[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            if weight > 1e-6 {
                return Ok(None);
            }
        }
    }
    let pinv = pseudoinverse(&a)?;
    let neg_b: Vec<C64> = b.iter().map(|z| -z).collect();
    let mut xs = pinv.apply(&neg_b)?;
    // one step of iterative refinement
    let r: Vec<C64> = a.apply(&xs)?.iter().zip(&b).map(|(p, q)| p + q).collect();
    let dx = pinv.apply(&r)?;
    for (x, d) in xs.iter_mut().zip(&dx) {
        *x -= d;
    }
    let r: Vec<C64> = a.apply(&xs)?.iter().zip(&b).map(|(p, q)| p + q).collect();
    let rn = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let bn = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if rn > 1e-9 * bn.max(1.0) {
        return Err(Error::Secular(format!("inconsistent conditions (residual {rn:.3e})")));
    }
    Ok(Some(xs.iter().zip(&col_scale).map(|(x, s)| x * s).collect()))
}

/// Terms of the `1/Γ` expansion through second order.
///
/// The kernel blocks are fixed by the secular conditions
/// `tr_{H_0}[H, ρ⁽ᵐ⁾] = 0` together with `tr ρ⁽ᵐ⁾ = 0`, solved as one linear
/// system for orders one to three, or deeper when that leaves `M⁽¹⁾` or
/// `M⁽²⁾` undetermined. A trivial
/// criterion (`κ = 0` with `H|Ψ⟩ = λ|Ψ⟩`) yields vanishing corrections.
pub fn expansion_terms(
    model: &LindbladModel,
    decomp: &BlockDecomposition,
    criterion: &CriterionReport,
) -> Result<ExpansionTerms> {
    let (d0, d1) = (decomp.d0, decomp.d1);
    let dinv = DissipatorInverse::from_model(model, decomp)?;
    let rec = rec_base(&decomp.h_rotated, &dinv, d0, d1);
    let nk = d1 * d1;

    if !criterion.satisfied {
        if criterion.is_trivial() {
            let zero = ComplexMatrix::zeros(d0 * d1, d0 * d1);
            let rho0 = rec.rho0();
            return Ok(ExpansionTerms {
                rho0: decomp.from_rotated(&rho0)?,
                rho1: zero.clone(),
                rho2: zero.clone(),
                m1: ComplexMatrix::zeros(d1, d1),
                m2: ComplexMatrix::zeros(d1, d1),
                q: vec![0.0; d1 - 1],
                mu: vec![0.0; d1 - 1],
                secular_residuals: [0.0; 3],
                rotated: [rho0, zero.clone(), zero],
            });
        }
        return Err(Error::CriterionNotSatisfied {
            residual: criterion.residual_norm,
            kappa: criterion.kappa.norm(),
        });
    }

    let scan = singularity_scan(decomp);
    if let Some(&index) = scan.poles.first() {
        return Err(Error::DegenerateTarget {
            index,
            gap: scan.gaps[index - 1],
        });
    }
    if !scan.k_invertible {
        return Err(Error::SingularK { det: scan.det_k });
    }

    let mut orders = MIN_ORDERS;
    let (x, rhos) = loop {
        let rec = Recursion { orders, ..rec_base(&decomp.h_rotated, &dinv, d0, d1) };
        match solve_kernels(&rec)? {
            Some(x) => {
                let rhos = rec.run(&x);
                break (x, rhos);
            }
            None if orders < MAX_ORDERS => orders += 1,
            None => {
                return Err(Error::Secular(format!(
                    "kernel blocks underdetermined through order {MAX_ORDERS}"
                )))
            }
        }
    };
    log::debug!("secular hierarchy closed at order {orders}");

    let h_scale = decomp.h_rotated.norm_fro().max(1.0);
    let mut secular_residuals = [0.0; 3];
    for (m, r) in rhos.iter().take(3).enumerate() {
        secular_residuals[m] = rec.secular_defect(r);
    }
    let worst = secular_residuals.iter().copied().fold(0.0, f64::max);
    if worst > SECULAR_TOL * h_scale {
        return Err(Error::Secular(format!("secular conditions violated by {worst:.3e}")));
    }

    let kernel = |m: usize| ComplexMatrix::from_fn(d1, d1, |a, b| x[m * nk + a * d1 + b]);
    let (m1, m2) = (kernel(0), kernel(1));
    let mu = (1..d1).map(|a| m1[(a, a)].re).collect();
    let q = (1..d1)
        .map(|a| (m2[(a, a)] - m1[(a, 0)] * m1[(0, a)]).re)
        .collect();
    let rotated = [rhos[0].clone(), rhos[1].clone(), rhos[2].clone()];
    Ok(ExpansionTerms {
        rho0: decomp.from_rotated(&rotated[0])?,
        rho1: decomp.from_rotated(&rotated[1])?,
        rho2: decomp.from_rotated(&rotated[2])?,
        m1,
        m2,
        q,
        mu,
        secular_residuals,
        rotated,
    })
}

/// `M⁽¹⁾ = 2i(Λ h_01 h_10 Φ − Φ h_01 h_10 Λ)` with `Φ = |0⟩⟨0|`, in the α
/// basis; `None` at a pole of `Λ`.
pub fn m1_closed_form(decomp: &BlockDecomposition) -> Option<ComplexMatrix> {
    let lam = decomp.lambda_resolvent(DEGENERACY_TOL)?;
    let d1 = decomp.d1;
    let mut phi = ComplexMatrix::zeros(d1, d1);
    phi[(0, 0)] = C64::new(1.0, 0.0);
    let hh = decomp.block(0, 1) * decomp.block(1, 0);
    let a = &(&lam * &hh) * &phi;
    let b = &(&phi * &hh) * &lam;
    Some((&a - &b).scale(I * 2.0))
}
