use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Split of a tensor-product space into the dissipated factor `H_0` and the
/// target factor `H_1`.
///
/// Factor 0 is the slowest-varying index of the full space. The factors in
/// `h0_factors` need not be contiguous. Block order is the full space
/// re-indexed as `e · d1 + α`, with `e` running over `H_0` (its factors in
/// the listed order) and `α` over the remaining factors in their natural
/// order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LayoutSpec", into = "LayoutSpec")]
pub struct HilbertLayout {
    factor_dims: Vec<usize>,
    h0_factors: Vec<usize>,
    h1_factors: Vec<usize>,
    d0: usize,
    d1: usize,
    /// `block_to_full[b]` is the full-space index of block index `b`.
    block_to_full: Vec<usize>,
    full_to_block: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct LayoutSpec {
    factor_dims: Vec<usize>,
    h0_factors: Vec<usize>,
}

impl TryFrom<LayoutSpec> for HilbertLayout {
    type Error = Error;

    fn try_from(s: LayoutSpec) -> Result<Self> {
        HilbertLayout::new(s.factor_dims, s.h0_factors)
    }
}

impl From<HilbertLayout> for LayoutSpec {
    fn from(l: HilbertLayout) -> Self {
        LayoutSpec {
            factor_dims: l.factor_dims,
            h0_factors: l.h0_factors,
        }
    }
}

impl HilbertLayout {
    pub fn new(factor_dims: Vec<usize>, h0_factors: Vec<usize>) -> Result<Self> {
        let n = factor_dims.len();
        if factor_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument("factor dimensions must be positive".into()));
        }
        if h0_factors.is_empty() {
            return Err(Error::InvalidArgument("H_0 needs at least one factor".into()));
        }
        let mut seen = vec![false; n];
        for &f in &h0_factors {
            if f >= n {
                return Err(Error::InvalidArgument(format!("factor {f} out of range (have {n})")));
            }
            if seen[f] {
                return Err(Error::InvalidArgument(format!("factor {f} listed twice")));
            }
            seen[f] = true;
        }
        let h1_factors: Vec<usize> = (0..n).filter(|&f| !seen[f]).collect();
        let d0: usize = h0_factors.iter().map(|&f| factor_dims[f]).product();
        let d1: usize = h1_factors.iter().map(|&f| factor_dims[f]).product();
        let dim = d0 * d1;

        // full-space strides, factor 0 slowest
        let mut stride = vec![1usize; n];
        for f in (0..n.saturating_sub(1)).rev() {
            stride[f] = stride[f + 1] * factor_dims[f + 1];
        }
        let mut block_to_full = vec![0usize; dim];
        for (b, slot) in block_to_full.iter_mut().enumerate() {
            let (mut e, mut a) = (b / d1, b % d1);
            let mut full = 0;
            for &f in h0_factors.iter().rev() {
                full += (e % factor_dims[f]) * stride[f];
                e /= factor_dims[f];
            }
            for &f in h1_factors.iter().rev() {
                full += (a % factor_dims[f]) * stride[f];
                a /= factor_dims[f];
            }
            *slot = full;
        }
        let mut full_to_block = vec![0usize; dim];
        for (b, &i) in block_to_full.iter().enumerate() {
            full_to_block[i] = b;
        }
        Ok(Self {
            factor_dims,
            h0_factors,
            h1_factors,
            d0,
            d1,
            block_to_full,
            full_to_block,
        })
    }

    /// Two factors, `H_0 ⊗ H_1`, with `H_0` first.
    pub fn bipartite(d0: usize, d1: usize) -> Result<Self> {
        Self::new(vec![d0, d1], vec![0])
    }

    /// `n` qubits with `H_0` on the listed sites.
    pub fn qubits(n: usize, h0_sites: Vec<usize>) -> Result<Self> {
        Self::new(vec![2; n], h0_sites)
    }

    pub fn d0(&self) -> usize {
        self.d0
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn dim(&self) -> usize {
        self.d0 * self.d1
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn h0_factors(&self) -> &[usize] {
        &self.h0_factors
    }

    pub fn h1_factors(&self) -> &[usize] {
        &self.h1_factors
    }

    /// True when block order coincides with the natural full-space order.
    pub fn is_identity_order(&self) -> bool {
        self.block_to_full.iter().enumerate().all(|(b, &i)| b == i)
    }

    pub fn block_to_full(&self, b: usize) -> usize {
        self.block_to_full[b]
    }

    pub fn full_to_block(&self, i: usize) -> usize {
        self.full_to_block[i]
    }

    /// Full-space index of `|e⟩ ⊗ |α⟩`.
    pub fn index(&self, e: usize, a: usize) -> usize {
        self.block_to_full[e * self.d1 + a]
    }

    /// Re-indexes a full-space operator into block order.
    pub fn to_block_order(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_op(m)?;
        let p = &self.block_to_full;
        Ok(ComplexMatrix::from_fn(m.rows(), m.cols(), |a, b| m[(p[a], p[b])]))
    }

    pub fn from_block_order(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_op(m)?;
        let p = &self.full_to_block;
        Ok(ComplexMatrix::from_fn(m.rows(), m.cols(), |a, b| m[(p[a], p[b])]))
    }

    pub fn vector_to_block_order(&self, v: &[C64]) -> Result<Vec<C64>> {
        self.check_len(v.len())?;
        Ok(self.block_to_full.iter().map(|&i| v[i]).collect())
    }

    pub fn vector_from_block_order(&self, v: &[C64]) -> Result<Vec<C64>> {
        self.check_len(v.len())?;
        Ok(self.full_to_block.iter().map(|&b| v[b]).collect())
    }

    /// Full-space amplitudes of `zeno ⊗ target`.
    pub fn product(&self, zeno: &[C64], target: &[C64]) -> Result<Vec<C64>> {
        if zeno.len() != self.d0 || target.len() != self.d1 {
            return Err(Error::DimensionMismatch(format!(
                "product of {} and {} in layout {}x{}",
                zeno.len(),
                target.len(),
                self.d0,
                self.d1
            )));
        }
        let block: Vec<C64> = zeno
            .iter()
            .flat_map(|&z| target.iter().map(move |&t| z * t))
            .collect();
        self.vector_from_block_order(&block)
    }

    /// Full-space operator `a ⊗ b` with `a` on `H_0` and `b` on `H_1`.
    pub fn product_operator(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.rows() != self.d0 || a.cols() != self.d0 || b.rows() != self.d1 || b.cols() != self.d1 {
            return Err(Error::DimensionMismatch("operator factors do not match layout".into()));
        }
        self.from_block_order(&super::kron(a, b))
    }

    fn check_op(&self, m: &ComplexMatrix) -> Result<()> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, layout dimension is {}",
                m.rows(),
                m.cols(),
                self.dim()
            )));
        }
        Ok(())
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector length {n}, layout dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguous_layout_is_identity_order() {
        let l = HilbertLayout::bipartite(2, 4).unwrap();
        assert!(l.is_identity_order());
        assert_eq!(l.index(1, 3), 7);
    }

    #[test]
    fn boundary_layout_permutation() {
        // sites 0 and 3 of a 4-qubit chain form H_0
        let l = HilbertLayout::qubits(4, vec![0, 3]).unwrap();
        assert_eq!((l.d0(), l.d1()), (4, 4));
        // e = (s0, s3) = (1, 0), α = (s1, s2) = (1, 1) -> bits 1 1 1 0
        assert_eq!(l.index(0b10, 0b11), 0b1110);
        for b in 0..16 {
            assert_eq!(l.full_to_block(l.block_to_full(b)), b);
        }
    }

    #[test]
    fn rejects_bad_factors() {
        assert!(HilbertLayout::new(vec![2, 2], vec![2]).is_err());
        assert!(HilbertLayout::new(vec![2, 2], vec![0, 0]).is_err());
        assert!(HilbertLayout::new(vec![2, 2], vec![]).is_err());
    }
}
