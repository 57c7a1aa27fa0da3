use crate::operators::{ComplexMatrix, C64};

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn orthogonalize(v: &mut [C64], basis: &[Vec<C64>]) {
    // two passes keep the result orthogonal to working precision
    for _ in 0..2 {
        for b in basis {
            let ov = dot(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= ov * y;
            }
        }
    }
}

/// Unitary whose first columns are the given orthonormal vectors, completed
/// by Gram–Schmidt on the standard basis.
///
/// At each step the standard basis vector with the largest remaining
/// component is taken (lowest index on ties), which keeps the completion
/// deterministic and well conditioned.
pub(crate) fn complete_basis(first: &[Vec<C64>], d: usize) -> ComplexMatrix {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(d);
    for v in first {
        let mut v = v.clone();
        orthogonalize(&mut v, &basis);
        let n = norm(&v);
        basis.push(v.iter().map(|z| z / n).collect());
    }
    while basis.len() < d {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for i in 0..d {
            let mut e = vec![C64::new(0.0, 0.0); d];
            e[i] = C64::new(1.0, 0.0);
            orthogonalize(&mut e, &basis);
            let n = norm(&e);
            if best.as_ref().map_or(true, |(bn, _)| n > *bn + 1e-12) {
                best = Some((n, e));
            }
        }
        let (n, e) = best.expect("d > 0");
        basis.push(e.iter().map(|z| z / n).collect());
    }
    ComplexMatrix::from_fn(d, d, |i, j| basis[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::c;

    #[test]
    fn completion_is_unitary() {
        let v = vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let u = complete_basis(&[v.clone()], 3);
        let g = &u.dagger() * &u;
        assert!((&g - &ComplexMatrix::identity(3)).norm_fro() < 1e-14);
        assert_eq!(u.col(0), v);
    }
}
