use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::models::TargetedModel;
use crate::zeno::{block_decompose_with_criterion, gamma_ch, CriterionReport, GammaChReport, CRITERION_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Criterion holds and nothing diverges.
    Yes,
    No,
    /// Criterion holds but `λ_0` is degenerate or `K` is singular.
    Singular,
    /// `κ = 0` and the target is already an eigenstate of `H`.
    Trivial,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Yes => "yes",
            Self::No => "no",
            Self::Singular => "singular",
            Self::Trivial => "trivial",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionSummary {
    pub model: String,
    pub criterion: CriterionReport,
    /// Spectrum of `h_00`, target first.
    pub h00_eigenvalues: Option<Vec<f64>>,
    pub gamma_ch: Option<GammaChReport>,
    pub verdict: Verdict,
    pub detail: String,
}

/// Criterion, Γ_ch by both routes, singularity diagnostics and a verdict.
pub fn report_criterion(tm: &TargetedModel) -> Result<CriterionSummary> {
    let criterion = tm.criterion(CRITERION_TOL)?;
    let kappa = criterion.kappa.norm();
    let mut summary = CriterionSummary {
        model: tm.name.clone(),
        h00_eigenvalues: None,
        gamma_ch: None,
        verdict: Verdict::No,
        detail: String::new(),
        criterion,
    };
    let c = &summary.criterion;
    if c.is_trivial() {
        summary.verdict = Verdict::Trivial;
        summary.detail = if c.strong_criterion {
            "kappa = 0: strong criterion holds, weak criterion trivial".into()
        } else {
            "kappa = 0: target is an eigenstate but not dark".into()
        };
        return Ok(summary);
    }
    if !c.satisfied {
        summary.detail = format!(
            "criterion fails: residual {:.3e} (tolerance {:.3e}), |kappa| = {kappa:.3e}",
            c.residual_norm,
            c.tol * c.h_norm
        );
        return Ok(summary);
    }
    let m = &tm.model;
    let decomp = block_decompose_with_criterion(m.hamiltonian(), &tm.zeno, &tm.target, m.layout(), c)?;
    let g = gamma_ch(m, &decomp, c)?;
    if g.divergent {
        summary.verdict = Verdict::Singular;
        let mut parts = Vec::new();
        if g.lambda0_degenerate {
            let with: Vec<String> = g.degenerate_with.iter().map(|a| format!("lambda_{a}")).collect();
            parts.push(format!("lambda_0 degenerate with {}", with.join(", ")));
        }
        if g.k_singular {
            parts.push(format!("K singular (det K = {:.3e})", g.det_k));
        }
        summary.detail = parts.join("; ");
    } else {
        summary.verdict = Verdict::Yes;
        summary.detail = "reachable".into();
    }
    summary.h00_eigenvalues = Some(decomp.lambda.clone());
    summary.gamma_ch = Some(g);
    Ok(summary)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.10}"))
}

impl CriterionSummary {
    pub fn render(&self) -> String {
        let c = &self.criterion;
        let mut s = String::new();
        writeln!(s, "model: {}", self.model).unwrap();
        writeln!(s, "lambda = {:.12}", c.lambda).unwrap();
        writeln!(s, "|kappa| = {:.12}", c.kappa.norm()).unwrap();
        writeln!(s, "residual = {:.3e} (tolerance {:.3e})", c.residual_norm, c.tol * c.h_norm).unwrap();
        let dark = c.dark.map_or("-", |d| if d { "yes" } else { "no" });
        writeln!(
            s,
            "eigenstate: {}  dark: {dark}  strong criterion: {}",
            yes_no(c.eigenstate),
            yes_no(c.strong_criterion)
        )
        .unwrap();
        if let Some(l) = &self.h00_eigenvalues {
            let l: Vec<String> = l.iter().map(|x| format!("{x:.6}")).collect();
            writeln!(s, "h00 spectrum: [{}]", l.join(", ")).unwrap();
        }
        if let Some(g) = &self.gamma_ch {
            let applicable = if g.theorem_applicable { "" } else { " (not applicable: dissipator is not a single Jordan chain)" };
            writeln!(s, "gamma_ch (closed form) = {}{applicable}", opt(g.gamma_ch_theorem)).unwrap();
            writeln!(s, "gamma_ch (expansion) = {}", opt(g.gamma_ch_expansion)).unwrap();
            writeln!(s, "det K = {:.6e}  K singular: {}", g.det_k, yes_no(g.k_singular)).unwrap();
            writeln!(s, "lambda_0 degenerate: {}  det(h00 - lambda_0) = {:.6e}", yes_no(g.lambda0_degenerate), g.det_h00_shifted).unwrap();
            if let Some(e) = &g.expansion_error {
                writeln!(s, "expansion: {e}").unwrap();
            }
        }
        writeln!(s, "target reachable in Zeno limit: {} ({})", self.verdict.as_str(), self.detail).unwrap();
        s
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
