//! Thin wrappers over `faer` decompositions with explicit residual checks.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

const RESIDUAL_TOL: f64 = 1e-9;

fn spectral_scale(m: &Mat<C64>) -> f64 {
    m.norm_l2().max(f64::MIN_POSITIVE)
}

/// Eigenvalues in ascending order and the unitary matrix of eigenvectors
/// (as columns) of a Hermitian matrix.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    m.check_square("hermitian_eig input")?;
    if !m.is_hermitian(1e-10) {
        return Err(Error::InvalidArgument("hermitian_eig input is not Hermitian".into()));
    }
    if m.rows() == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let a = m.to_faer();
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence("Hermitian eigensolver"))?;
    let w: Vec<f64> = evd.S().column_vector().iter().map(|z| z.re).collect();
    let u = evd.U();
    let r = &a * u - Mat::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * w[j]);
    if r.norm_max() > RESIDUAL_TOL * a.norm_max().max(1.0) * (m.rows() as f64).sqrt() {
        return Err(Error::NoConvergence("Hermitian eigensolver"));
    }
    Ok((w, ComplexMatrix::from_faer(u)))
}

/// Eigenvalues of a general square matrix, in solver order.
pub fn general_eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    m.check_square("general_eig input")?;
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    m.to_faer()
        .eigenvalues()
        .map_err(|_| Error::NoConvergence("general eigensolver"))
}

/// Eigenvalues and unit-norm right eigenvectors (as columns).
pub fn general_eig(m: &ComplexMatrix) -> Result<(Vec<C64>, ComplexMatrix)> {
    m.check_square("general_eig input")?;
    if m.rows() == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let a = m.to_faer();
    let evd = a
        .eigen()
        .map_err(|_| Error::NoConvergence("general eigensolver"))?;
    let w: Vec<C64> = evd.S().column_vector().iter().copied().collect();
    let mut u = evd.U().to_owned();
    for j in 0..u.ncols() {
        let n = u.col(j).norm_l2();
        if n > 0.0 {
            for i in 0..u.nrows() {
                u[(i, j)] /= n;
            }
        }
    }
    let r = &a * &u - Mat::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * w[j]);
    let worst = (0..r.ncols()).map(|j| r.col(j).norm_l2()).fold(0.0, f64::max);
    if !(worst <= RESIDUAL_TOL * spectral_scale(&a)) {
        return Err(Error::NoConvergence("general eigensolver"));
    }
    Ok((w, ComplexMatrix::from_faer(u.as_ref())))
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(Vec::new());
    }
    m.to_faer()
        .singular_values()
        .map_err(|_| Error::NoConvergence("SVD"))
}

/// Orthonormal basis (as columns) of `{v : ‖m v‖ ≤ tol ‖m‖₂}`.
pub fn null_space(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let n = m.cols();
    if m.rows() == 0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let a = m.to_faer();
    let svd = a.svd().map_err(|_| Error::NoConvergence("SVD"))?;
    let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let v = svd.V();
    let keep: Vec<usize> = (0..n)
        .filter(|&j| s.get(j).map_or(true, |&sj| sj <= tol * smax))
        .collect();
    Ok(ComplexMatrix::from_fn(n, keep.len(), |i, k| v[(i, keep[k])]))
}

/// Solves the square system `m x = b`; fails if `m` is numerically singular.
pub fn solve(m: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.check_square("solve matrix")?;
    if b.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} rows, matrix is {n}x{n}",
            b.rows()
        )));
    }
    let a = m.to_faer();
    let rhs = b.to_faer();
    let sv = a.singular_values().map_err(|_| Error::NoConvergence("SVD"))?;
    let (hi, lo) = (sv[0], sv[sv.len() - 1]);
    if !(lo > n as f64 * f64::EPSILON * hi) {
        return Err(Error::InvalidArgument("matrix is numerically singular".into()));
    }
    let x = a.full_piv_lu().solve(&rhs);
    if !x.norm_max().is_finite() {
        return Err(Error::InvalidArgument("matrix is numerically singular".into()));
    }
    Ok(ComplexMatrix::from_faer(x.as_ref()))
}

/// Minimum-norm least-squares solution of `m x = b`.
pub fn pseudo_solve(m: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rcond = m.rows().max(m.cols()) as f64 * f64::EPSILON;
    pseudo_solve_with(m, b, rcond)
}

/// As [`pseudo_solve`], treating singular values below `rcond · σ_max` as zero.
pub fn pseudo_solve_with(m: &ComplexMatrix, b: &ComplexMatrix, rcond: f64) -> Result<ComplexMatrix> {
    if b.rows() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} rows, matrix has {}",
            b.rows(),
            m.rows()
        )));
    }
    let p = pseudoinverse_with(m, rcond)?;
    Ok(&p * b)
}

/// Moore–Penrose pseudoinverse with the default cutoff.
pub fn pseudoinverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rcond = m.rows().max(m.cols()) as f64 * f64::EPSILON;
    pseudoinverse_with(m, rcond)
}

fn pseudoinverse_with(m: &ComplexMatrix, rcond: f64) -> Result<ComplexMatrix> {
    let (r, c) = (m.rows(), m.cols());
    if r == 0 || c == 0 {
        return Ok(ComplexMatrix::zeros(c, r));
    }
    let svd = m.to_faer().thin_svd().map_err(|_| Error::NoConvergence("SVD"))?;
    let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let cut = rcond * s.first().copied().unwrap_or(0.0);
    let (u, v) = (svd.U(), svd.V());
    let k = s.len();
    let vs = Mat::from_fn(c, k, |i, j| {
        if s[j] > cut {
            v[(i, j)] / s[j]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let p = &vs * u.adjoint();
    Ok(ComplexMatrix::from_faer(p.as_ref()))
}

pub fn determinant(m: &ComplexMatrix) -> Result<C64> {
    let n = m.check_square("determinant input")?;
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok(m.to_faer().determinant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{c, jordan_block, re};

    #[test]
    fn hermitian_eig_sorted() {
        let (w, _) = hermitian_eig(&ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(w, vec![1.0, 2.0, 3.0]);
        let nh = ComplexMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 0.0));
        assert!(hermitian_eig(&nh).is_err());
    }

    #[test]
    fn jordan_null_space() {
        let ns = null_space(&jordan_block(2).unwrap(), 1e-12).unwrap();
        assert_eq!(ns.cols(), 1);
        assert!((ns[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert!(ns[(1, 0)].norm() < 1e-14);
    }

    #[test]
    fn solve_rejects_singular() {
        let m = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let b = ComplexMatrix::column(&[re(1.0), re(1.0)]);
        assert!(solve(&m, &b).is_err());
        let x = pseudo_solve(&m, &b).unwrap();
        assert!((x[(0, 0)] - re(1.0)).norm() < 1e-15);
        assert!(x[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn determinant_of_diagonal() {
        let d = determinant(&ComplexMatrix::from_real_diag(&[2.0, -3.0])).unwrap();
        assert!((d - re(-6.0)).norm() < 1e-14);
    }
}
