use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-12;

/// Unit-norm state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Accepts amplitudes whose norm is 1 within `1e-12`.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!("state norm is {n}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= n;
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `self ⊗ other` in the natural (left factor slowest) order.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|&a| other.amplitudes.iter().map(move |&b| a * b))
            .collect();
        PureState { amplitudes }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// `⟨ψ|m|ψ⟩`.
    pub fn expectation(&self, m: &ComplexMatrix) -> Result<C64> {
        let mv = m.apply(&self.amplitudes)?;
        Ok(self.amplitudes.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum())
    }
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::c;

    #[test]
    fn norm_is_enforced() {
        assert!(PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        let s = PureState::normalized(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!((s.inner(&s).re - 1.0).abs() < 1e-15);
        assert!(PureState::normalized(vec![c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn tensor_product_order() {
        let up = PureState::basis(2, 0);
        let dn = PureState::basis(2, 1);
        assert_eq!(up.tensor(&dn), PureState::basis(4, 1));
        assert_eq!(dn.tensor(&up), PureState::basis(4, 2));
    }
}
