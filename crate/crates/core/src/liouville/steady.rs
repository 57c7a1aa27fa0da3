use faer::linalg::solvers::Solve;
use faer::Mat;
use serde::Serialize;

use super::model::{liouvillian_matrix, LindbladModel};
use crate::error::{Error, Result};
use crate::operators::{general_eig, general_eigenvalues, hermitian_eig, ComplexMatrix, C64};

/// Eigenvalues with `|λ| ≤ NULL_TOL · ‖𝓛‖_F` count as zero.
const NULL_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of the steady state.
const PSD_TOL: f64 = 1e-9;
/// Largest dimension solved by the full eigendecomposition under `Auto`.
const FULL_EIGEN_MAX_DIM: usize = 64;
const INVERSE_ITERATION_MAX_DIM: usize = 128;
const INVERSE_ITERATION_STEPS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub enum NessMethod {
    /// Full eigendecomposition up to `d = 64`, inverse iteration above.
    #[default]
    Auto,
    FullEigen,
    InverseIteration,
}

#[derive(Clone, Debug)]
pub struct NessResult {
    pub rho: ComplexMatrix,
    /// `‖𝓛ρ‖_F / ‖ρ‖_F`.
    pub residual: f64,
    pub nullity: usize,
    pub unique: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumResult {
    /// Sorted by descending real part.
    #[serde(serialize_with = "serialize_complex_list")]
    pub eigenvalues: Vec<C64>,
    /// `−Re λ₁`.
    pub gap: f64,
    pub tau_relax: f64,
    /// `‖𝓛‖_F`, the scale for the "numerically zero" test.
    pub scale: f64,
}

fn serialize_complex_list<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

pub fn ness(model: &LindbladModel) -> Result<NessResult> {
    ness_with(model, NessMethod::Auto)
}

pub fn ness_with(model: &LindbladModel, method: NessMethod) -> Result<NessResult> {
    if !(model.gamma() > 0.0) {
        return Err(Error::InvalidArgument("steady state requires gamma > 0".into()));
    }
    let d = model.dim();
    let method = match method {
        NessMethod::Auto if d <= FULL_EIGEN_MAX_DIM => NessMethod::FullEigen,
        NessMethod::Auto => NessMethod::InverseIteration,
        m => m,
    };
    if method == NessMethod::InverseIteration && d > INVERSE_ITERATION_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "dimension {d} exceeds the dense steady-state limit {INVERSE_ITERATION_MAX_DIM}"
        )));
    }
    if d > FULL_EIGEN_MAX_DIM {
        log::warn!("dense steady state at d = {d} ({}² generator) is slow", d * d);
    }
    let lm = liouvillian_matrix(model);
    let scale = lm.norm_fro();
    let (vecs, nullity) = match method {
        NessMethod::FullEigen => null_vectors_eig(&lm, scale)?,
        _ => null_vectors_inverse_iteration(&lm, scale)?,
    };
    // the representative with the largest trace is the best conditioned one
    let best = vecs
        .iter()
        .max_by(|a, b| trace_of(a, d).norm().total_cmp(&trace_of(b, d).norm()))
        .expect("at least one null vector");
    let tr = trace_of(best, d);
    if tr.norm() < f64::EPSILON {
        return Err(Error::NoSteadyState { smallest: 0.0 });
    }
    // fix the phase and scale first, then Hermitize
    let raw = ComplexMatrix::unvectorize(best, d)?.scale(C64::new(1.0, 0.0) / tr);
    let mut rho = raw.hermitian_part();
    let t = rho.trace().re;
    rho = rho.scale_real(1.0 / t);
    let unique = nullity == 1;

    let lv: Vec<C64> = lm.apply(&rho.vectorize())?;
    let residual = lv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / rho.norm_fro();
    if unique {
        let (w, _) = hermitian_eig(&rho)?;
        let min = w.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPositive { min });
        }
    }
    Ok(NessResult {
        rho,
        residual,
        nullity,
        unique,
    })
}

fn trace_of(v: &[C64], d: usize) -> C64 {
    (0..d).map(|i| v[i + i * d]).sum()
}

fn null_vectors_eig(lm: &ComplexMatrix, scale: f64) -> Result<(Vec<Vec<C64>>, usize)> {
    let (w, u) = general_eig(lm)?;
    let tol = NULL_TOL * scale;
    let zero: Vec<usize> = (0..w.len()).filter(|&i| w[i].norm() <= tol).collect();
    if zero.is_empty() {
        let smallest = w.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        return Err(Error::NoSteadyState { smallest });
    }
    let mut vecs: Vec<Vec<C64>> = zero.iter().map(|&j| u.col(j)).collect();
    if vecs.len() == 1 {
        // the eigensolver vector can be off by ~1e-10 at large gamma; polish it
        let solver = ShiftedSolver::new(lm, scale);
        let seed = vecs.pop().expect("one null vector");
        let seed_res = solver.residual(&seed);
        let (x, res) = solver.iterate(seed.clone(), None);
        vecs.push(if res < seed_res { x } else { seed });
    }
    Ok((vecs, zero.len()))
}

/// LU factors of `𝓛 − σ` for a shift `σ` far below the spectral gap.
struct ShiftedSolver {
    a: Mat<C64>,
    lu: faer::linalg::solvers::PartialPivLu<C64>,
    n: usize,
}

impl ShiftedSolver {
    fn new(lm: &ComplexMatrix, scale: f64) -> Self {
        let n = lm.rows();
        let a = lm.to_faer();
        let shift = C64::new(1e-10, 1e-10) * scale;
        let shifted = Mat::from_fn(n, n, |i, j| if i == j { a[(i, j)] - shift } else { a[(i, j)] });
        let lu = shifted.partial_piv_lu();
        ShiftedSolver { a, lu, n }
    }

    fn residual(&self, x: &[C64]) -> f64 {
        let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let lx = &self.a * Mat::from_fn(self.n, 1, |i, _| x[i] / nrm);
        lx.norm_l2()
    }

    /// Inverse iteration from `start`, kept orthogonal to `against`, until the
    /// residual stops improving. Returns the best unit vector and its residual.
    fn iterate(&self, start: Vec<C64>, against: Option<&[C64]>) -> (Vec<C64>, f64) {
        let n = self.n;
        let mut x = start;
        let mut best = (x.clone(), f64::INFINITY);
        let mut stalled = 0;
        for _ in 0..INVERSE_ITERATION_STEPS {
            if let Some(p) = against {
                let ov: C64 = p.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
                for (xi, pi) in x.iter_mut().zip(p) {
                    *xi -= ov * pi;
                }
            }
            let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm == 0.0 || !nrm.is_finite() {
                break;
            }
            let rhs = Mat::from_fn(n, 1, |i, _| x[i] / nrm);
            let y = self.lu.solve(&rhs);
            let ny = y.norm_l2();
            if ny == 0.0 || !ny.is_finite() {
                break;
            }
            x = (0..n).map(|i| y[(i, 0)] / ny).collect();
            let res = self.residual(&x);
            if res < 0.5 * best.1 {
                stalled = 0;
            } else {
                stalled += 1;
            }
            if res < best.1 {
                best = (x.clone(), res);
            }
            if stalled >= 2 {
                break;
            }
        }
        best
    }
}

fn null_vectors_inverse_iteration(lm: &ComplexMatrix, scale: f64) -> Result<(Vec<Vec<C64>>, usize)> {
    let n = lm.rows();
    let d = (n as f64).sqrt().round() as usize;
    let solver = ShiftedSolver::new(lm, scale);
    let tol = NULL_TOL * scale * 10.0;

    let mut start = vec![C64::new(0.0, 0.0); n];
    for i in 0..d {
        start[i + i * d] = C64::new(1.0 / d as f64, 0.0);
    }
    let (x1, r1) = solver.iterate(start, None);
    if !(r1 <= tol) {
        return Err(Error::NoSteadyState { smallest: r1 });
    }
    // probe for a second, orthogonal null vector
    let mut probe = vec![C64::new(0.0, 0.0); n];
    probe[0] = C64::new(1.0, 0.0);
    probe[n - 1] = C64::new(0.5, 0.0);
    let (x2, r2) = solver.iterate(probe, Some(&x1));
    let nullity = if r2 <= tol { 2 } else { 1 };
    let mut vecs = vec![x1];
    if nullity == 2 {
        vecs.push(x2);
    }
    Ok((vecs, nullity))
}

pub fn spectrum(model: &LindbladModel) -> Result<SpectrumResult> {
    if !(model.gamma() > 0.0) {
        return Err(Error::InvalidArgument("spectrum requires gamma > 0".into()));
    }
    let lm = liouvillian_matrix(model);
    let scale = lm.norm_fro();
    let mut eigenvalues = general_eigenvalues(&lm)?;
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    let gap = eigenvalues.get(1).map_or(f64::INFINITY, |z| -z.re);
    Ok(SpectrumResult {
        gap,
        tau_relax: 1.0 / gap,
        eigenvalues,
        scale,
    })
}

impl SpectrumResult {
    /// Number of eigenvalues with `|λ| ≤ 1e-12 ‖𝓛‖_F`.
    pub fn nullity(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|z| z.norm() <= NULL_TOL * self.scale)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{jordan_block, HilbertLayout};

    fn decay(gamma: f64) -> LindbladModel {
        let layout = HilbertLayout::bipartite(2, 1).unwrap();
        LindbladModel::new(ComplexMatrix::zeros(2, 2), vec![jordan_block(2).unwrap()], gamma, layout)
            .unwrap()
    }

    #[test]
    fn dark_state_is_steady() {
        for method in [NessMethod::FullEigen, NessMethod::InverseIteration] {
            let r = ness_with(&decay(3.0), method).unwrap();
            assert!(r.unique);
            assert!((r.rho[(0, 0)].re - 1.0).abs() < 1e-12);
            assert!(r.residual < 1e-9);
        }
    }

    #[test]
    fn decay_spectrum() {
        let s = spectrum(&decay(1.0)).unwrap();
        let re: Vec<f64> = s.eigenvalues.iter().map(|z| z.re).collect();
        for (a, b) in re.iter().zip([0.0, -0.5, -0.5, -1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((s.gap - 0.5).abs() < 1e-12);
        assert_eq!(s.nullity(), 1);
    }

    #[test]
    fn zero_gamma_rejected() {
        assert!(ness(&decay(0.0)).is_err());
    }

    #[test]
    fn degenerate_kernel_reported() {
        let layout = HilbertLayout::bipartite(2, 1).unwrap();
        let m = LindbladModel::new(ComplexMatrix::from_real_diag(&[1.0, -1.0]), vec![], 1.0, layout).unwrap();
        let r = ness_with(&m, NessMethod::FullEigen).unwrap();
        assert!(!r.unique);
        assert_eq!(r.nullity, 2);
        let r = ness_with(&m, NessMethod::InverseIteration).unwrap();
        assert_eq!(r.nullity, 2);
    }
}
