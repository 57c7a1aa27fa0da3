use super::TargetedModel;
use crate::error::Result;
use crate::liouville::LindbladModel;
use crate::operators::{c, embed, kron, re, sigma_plus, ComplexMatrix, HilbertLayout, PureState, C64};

/// `Q_{k,j} = i^{k−j} (mod(⌊7 tan(k⁷ j⁴)⌋, 2) + 0.7)`.
///
/// `k⁷ j⁴` is formed exactly in integers before the tangent; the remainder
/// is the nonnegative one.
pub fn bell_q(k: u64, j: u64) -> C64 {
    let arg = k.pow(7) * j.pow(4);
    let bit = (7.0 * (arg as f64).tan()).floor().rem_euclid(2.0);
    let phase = match (k as i64 - j as i64).rem_euclid(4) {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    };
    phase * (bit + 0.7)
}

/// `(h_00, h_01, h_11)` in the α basis; `h_10 = h_01†`.
///
/// `epsilon` switches to the variant with `⟨0|h_10|1⟩ = ε` and
/// `⟨0|h_10|α⟩ = 0` for `α = 2, 3`.
pub fn bell3_blocks(lambda: f64, epsilon: Option<f64>) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let h00 = ComplexMatrix::from_real_diag(&[lambda, -1.0, 3.0, 5.0]);
    let mut h01 = ComplexMatrix::from_fn(4, 4, |a, b| {
        let (a, b) = (a as u64, b as u64);
        bell_q(a + 1, b + 5) + bell_q(b + 1, a + 5).conj()
    });
    let h11 = ComplexMatrix::from_fn(4, 4, |a, b| {
        let (a, b) = (a as u64, b as u64);
        (bell_q(a + 5, b + 5) + bell_q(b + 5, a + 5).conj()) * 0.5
    });
    // ⟨α|h_10|0⟩ = 0.7 δ_α0
    for b in 0..4 {
        h01[(0, b)] = re(if b == 0 { 0.7 } else { 0.0 });
    }
    if let Some(eps) = epsilon {
        h01[(1, 0)] = re(eps);
        h01[(2, 0)] = re(0.0);
        h01[(3, 0)] = re(0.0);
    }
    (h00, h01, h11)
}

/// Columns: Bell state, `|↑↓⟩`, `|↓↑⟩`, `(|↑↑⟩ − |↓↓⟩)/√2`.
fn bell_basis() -> ComplexMatrix {
    let s = 0.5f64.sqrt();
    ComplexMatrix::from_real_rows(&[
        &[s, 0.0, 0.0, s],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[s, 0.0, 0.0, -s],
    ])
    .expect("4x4")
}

fn assemble(name: String, lambda: f64, epsilon: Option<f64>) -> Result<TargetedModel> {
    let (h00, h01, h11) = bell3_blocks(lambda, epsilon);
    let u = bell_basis();
    let ud = u.dagger();
    let site = |m: &ComplexMatrix| &(&u * m) * &ud;
    let proj = |i: usize, j: usize| {
        let mut e = ComplexMatrix::zeros(2, 2);
        e[(i, j)] = re(1.0);
        e
    };
    let mut h = kron(&proj(0, 0), &site(&h00));
    h += &kron(&proj(1, 1), &site(&h11));
    h += &kron(&proj(0, 1), &site(&h01));
    h += &kron(&proj(1, 0), &site(&h01.dagger()));
    let h = h.hermitian_part();

    let layout = HilbertLayout::qubits(3, vec![0])?;
    let l = embed(&sigma_plus(), 0, &layout)?;
    let model = LindbladModel::new(h, vec![l], 1.0, layout)?;
    let target = PureState::normalized(u.col(0))?;
    TargetedModel::new(name, model, PureState::basis(2, 0), target)
}

/// Three qubits targeting the Bell state `(|↑↑⟩ + |↓↓⟩)/√2` on qubits 2–3,
/// with `L = σ⁺` on qubit 1 and `h_00 = diag(λ, −1, 3, 5)`. Γ = 1.
pub fn bell3_model(lambda: f64) -> Result<TargetedModel> {
    assemble(format!("bell3(lambda={lambda})"), lambda, None)
}

/// The Bell model at `λ = 1` with `⟨0|h_10|1⟩ = ε`.
pub fn bell3_epsilon_model(epsilon: f64) -> Result<TargetedModel> {
    assemble(format!("bell3_epsilon(epsilon={epsilon})"), 1.0, Some(epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_phase_cycle() {
        // |Q| ∈ {0.7, 1.7} and the phase is i^{k−j}
        for k in 1..9 {
            for j in 1..9 {
                let q = bell_q(k, j);
                let m = q.norm();
                assert!((m - 0.7).abs() < 1e-15 || (m - 1.7).abs() < 1e-15);
            }
        }
        assert!(bell_q(2, 1).re.abs() < 1e-15);
    }

    #[test]
    fn caption_constraints() {
        let (_, h01, h11) = bell3_blocks(1.0, None);
        let h10 = h01.dagger();
        assert_eq!(h10[(0, 0)], re(0.7));
        for a in 1..4 {
            assert_eq!(h10[(a, 0)], re(0.0));
        }
        assert!(h11.is_hermitian(1e-15));
    }
}
