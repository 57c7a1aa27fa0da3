use serde::Serialize;

use super::decomposition::BlockDecomposition;
use super::{DEGENERACY_TOL, K_SINGULAR_TOL};
use crate::operators::{determinant, singular_values, ComplexMatrix, C64};

/// Gershgorin classification of `K` by the numbers `d_α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GershgorinClass {
    /// Every `d_α > 0`: `K` is invertible.
    AllPositive,
    /// Every `d_α = 0`: `K` is singular.
    AllZero,
    /// Decided by `det K`.
    Mixed,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularityScan {
    /// Indices `α > 0` with `λ_α` degenerate with `λ_0`.
    pub poles: Vec<usize>,
    /// `λ_α − λ_0` for `α > 0`.
    pub gaps: Vec<f64>,
    /// `d_α = Σ_{k>0} |⟨0|h_k0|α⟩|²` for `α > 0`.
    pub d: Vec<f64>,
    /// Indices `α > 0` with `d_α = 0`.
    pub zero_d: Vec<usize>,
    /// Row-major `(d1−1)×(d1−1)`.
    pub k: Vec<Vec<f64>>,
    pub det_k: f64,
    /// `σ_min / σ_max` of `K`.
    pub k_condition: f64,
    pub class: GershgorinClass,
    pub k_invertible: bool,
    /// `Π_{α>0} (λ_α − λ_0)`.
    pub det_h00_shifted: f64,
}

impl SingularityScan {
    pub fn lambda0_degenerate(&self) -> bool {
        !self.poles.is_empty()
    }

    pub fn divergent(&self) -> bool {
        self.lambda0_degenerate() || !self.k_invertible
    }
}

/// `K_αβ = Σ_{k≥1} (|⟨α|h_k0|β⟩|² − δ_αβ ⟨α|h_k0† h_k0|α⟩)` for `α, β ≥ 1`.
pub(crate) fn k_matrix(decomp: &BlockDecomposition) -> Vec<Vec<f64>> {
    let d1 = decomp.d1;
    let mut k = vec![vec![0.0; d1 - 1]; d1 - 1];
    for kk in 1..decomp.d0 {
        let h = decomp.block(kk, 0);
        let hh = &h.dagger() * h;
        for a in 1..d1 {
            for b in 1..d1 {
                k[a - 1][b - 1] += h[(a, b)].norm_sqr();
            }
            k[a - 1][a - 1] -= hh[(a, a)].re;
        }
    }
    k
}

pub fn singularity_scan(decomp: &BlockDecomposition) -> SingularityScan {
    let d1 = decomp.d1;
    let l0 = decomp.lambda[0];
    let scale = decomp.h00_norm();
    let gaps: Vec<f64> = decomp.lambda[1..].iter().map(|l| l - l0).collect();
    let poles: Vec<usize> = (1..d1)
        .filter(|&a| gaps[a - 1].abs() <= DEGENERACY_TOL * scale)
        .collect();
    let det_h00_shifted = gaps.iter().product();

    let mut d = vec![0.0; d1.saturating_sub(1)];
    let mut coupling = 0.0;
    for kk in 1..decomp.d0 {
        let h = decomp.block(kk, 0);
        coupling += h.norm_fro().powi(2);
        for a in 1..d1 {
            d[a - 1] += h[(0, a)].norm_sqr();
        }
    }
    let d_tol = 1e-24 * coupling.max(f64::MIN_POSITIVE);
    let zero_d: Vec<usize> = (1..d1).filter(|&a| d[a - 1] <= d_tol).collect();
    let class = if zero_d.is_empty() {
        GershgorinClass::AllPositive
    } else if zero_d.len() == d.len() {
        GershgorinClass::AllZero
    } else {
        GershgorinClass::Mixed
    };

    let k = k_matrix(decomp);
    let km = ComplexMatrix::from_fn(d1 - 1, d1 - 1, |i, j| C64::new(k[i][j], 0.0));
    let det_k = determinant(&km).map(|z| z.re).unwrap_or(f64::NAN);
    let sv = singular_values(&km).unwrap_or_default();
    let k_condition = match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        (Some(_), Some(_)) => 0.0,
        _ => 1.0,
    };
    let k_invertible = match class {
        GershgorinClass::AllPositive => true,
        GershgorinClass::AllZero => false,
        GershgorinClass::Mixed => k_condition > K_SINGULAR_TOL,
    } && k_condition > K_SINGULAR_TOL;
    SingularityScan {
        poles,
        gaps,
        d,
        zero_d,
        k,
        det_k,
        k_condition,
        class,
        k_invertible,
        det_h00_shifted,
    }
}
