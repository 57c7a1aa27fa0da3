use serde::Serialize;

use super::criterion::CriterionReport;
use super::decomposition::BlockDecomposition;
use super::expansion::expansion_terms;
use super::inverse::DissipatorInverse;
use super::singular::{singularity_scan, SingularityScan};
use super::{DEGENERACY_TOL, K_SINGULAR_TOL};
use crate::error::{Error, Result};
use crate::liouville::{ness, purity_deficit, LindbladModel};
use crate::operators::{pseudo_solve, ComplexMatrix, C64};

/// Characteristic dissipative strength by the closed-form route, the
/// expansion route and (optionally) a numeric fit.
#[derive(Clone, Debug, Serialize)]
pub struct GammaChReport {
    /// `8|κ|² Σ_αβ (K⁻¹)_αβ R_β` before taking the magnitude.
    pub theorem_sum: Option<f64>,
    /// `√|theorem_sum|`.
    pub gamma_ch_theorem: Option<f64>,
    /// The closed form presumes a single Jordan-chain dissipator on `H_0`.
    pub theorem_applicable: bool,
    /// `√(−tr ρ⁽¹⁾² − 2 tr ρ⁽⁰⁾ρ⁽²⁾)`.
    pub gamma_ch_expansion: Option<f64>,
    /// `√(−2 Σ_α |M⁽¹⁾_0α|² − 2 M⁽²⁾_00)`.
    pub gamma_ch_expansion_kernel: Option<f64>,
    pub gamma_ch_fit: Option<f64>,
    /// `|theorem − expansion| / expansion`.
    pub relative_deviation: Option<f64>,
    pub k: Vec<Vec<f64>>,
    pub det_k: f64,
    pub k_singular: bool,
    pub lambda0_degenerate: bool,
    /// Indices `α` degenerate with `λ_0`.
    pub degenerate_with: Vec<usize>,
    pub divergent: bool,
    pub det_h00_shifted: f64,
    /// Why the expansion route produced no value, if it did not.
    pub expansion_error: Option<String>,
}

/// `F = Σ_{k≥1} (h_k1 + [Λ h_01, h_k0])`.
fn f_operator(decomp: &BlockDecomposition, lam: &ComplexMatrix) -> ComplexMatrix {
    let d1 = decomp.d1;
    let lh01 = lam * decomp.block(0, 1);
    let mut f = ComplexMatrix::zeros(d1, d1);
    for k in 1..decomp.d0 {
        let hk0 = decomp.block(k, 0);
        f += decomp.block(k, 1);
        f += &(&lh01 * hk0);
        f -= &(hk0 * &lh01);
    }
    f
}

fn theorem_route(decomp: &BlockDecomposition, criterion: &CriterionReport, scan: &SingularityScan) -> Option<f64> {
    let lam = decomp.lambda_resolvent(DEGENERACY_TOL)?;
    let d1 = decomp.d1;
    if d1 == 1 {
        return Some(0.0);
    }
    let f = f_operator(decomp, &lam);
    let r: Vec<C64> = (1..d1).map(|a| C64::new(f[(a, 0)].norm_sqr(), 0.0)).collect();
    let km = ComplexMatrix::from_fn(d1 - 1, d1 - 1, |i, j| C64::new(scan.k[i][j], 0.0));
    let x = pseudo_solve(&km, &ComplexMatrix::column(&r)).ok()?;
    let s: f64 = (0..d1 - 1).map(|i| x[(i, 0)].re).sum();
    Some(8.0 * criterion.kappa.norm_sqr() * s)
}

/// Γ_ch by the closed form and by the expansion, with singularity
/// diagnostics. Singular points are flagged rather than reported as errors.
pub fn gamma_ch(
    model: &LindbladModel,
    decomp: &BlockDecomposition,
    criterion: &CriterionReport,
) -> Result<GammaChReport> {
    if !criterion.satisfied {
        return Err(Error::CriterionNotSatisfied {
            residual: criterion.residual_norm,
            kappa: criterion.kappa.norm(),
        });
    }
    let scan = singularity_scan(decomp);
    let k_singular = !scan.k_invertible || scan.k_condition <= K_SINGULAR_TOL;
    let lambda0_degenerate = scan.lambda0_degenerate();
    let divergent = lambda0_degenerate || k_singular;
    let theorem_applicable = DissipatorInverse::from_model(model, decomp)
        .map(|d| d.is_single_jordan_chain())
        .unwrap_or(false);

    let theorem_sum = if divergent { None } else { theorem_route(decomp, criterion, &scan) };
    let gamma_ch_theorem = theorem_sum.map(|s| s.abs().sqrt());

    let (mut gamma_ch_expansion, mut gamma_ch_expansion_kernel, mut expansion_error) = (None, None, None);
    if divergent {
        expansion_error = Some("singular point".to_string());
    } else {
        match expansion_terms(model, decomp, criterion) {
            Ok(t) => {
                gamma_ch_expansion = Some(t.purity_coefficient().max(0.0).sqrt());
                gamma_ch_expansion_kernel = Some(t.purity_coefficient_from_kernel().max(0.0).sqrt());
            }
            Err(e) => expansion_error = Some(e.to_string()),
        }
    }
    let relative_deviation = match (gamma_ch_theorem, gamma_ch_expansion) {
        (Some(t), Some(e)) if e > 0.0 => Some((t - e).abs() / e),
        _ => None,
    };
    Ok(GammaChReport {
        theorem_sum,
        gamma_ch_theorem,
        theorem_applicable,
        gamma_ch_expansion,
        gamma_ch_expansion_kernel,
        gamma_ch_fit: None,
        relative_deviation,
        k: scan.k.clone(),
        det_k: scan.det_k,
        k_singular,
        lambda0_degenerate,
        degenerate_with: scan.poles.clone(),
        divergent,
        det_h00_shifted: scan.det_h00_shifted,
        expansion_error,
    })
}

/// Least-squares fit of `Γ² (1 − tr ρ²_NESS(Γ)) = a + b/Γ`; returns `√a`.
pub fn gamma_ch_fit(model: &LindbladModel, gammas: &[f64]) -> Result<f64> {
    if gammas.len() < 3 {
        return Err(Error::InvalidArgument("fit needs at least three gamma values".into()));
    }
    let mut pts = Vec::with_capacity(gammas.len());
    for &g in gammas {
        let r = ness(&model.with_gamma(g)?)?;
        if !r.unique {
            return Err(Error::NonUniqueSteadyState { nullity: r.nullity });
        }
        pts.push((1.0 / g, g * g * purity_deficit(&r.rho)));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    if det.abs() <= f64::EPSILON * n * sxx {
        return Err(Error::InvalidArgument("gamma values must be distinct".into()));
    }
    let a = (sxx * sy - sx * sxy) / det;
    Ok(a.max(0.0).sqrt())
}
