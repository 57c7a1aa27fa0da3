use crate::error::{Error, Result};
use crate::operators::{ComplexMatrix, HilbertLayout, C64, I};

/// `∂ρ/∂t = −i[H, ρ] + Γ Σ_k r_k D_{L_k} ρ` with `D_L ρ = LρL† − ½{L†L, ρ}`.
///
/// Jump operators are stored already embedded in the full space. The rates
/// `r_k` default to 1 so that a single Γ scales every dissipator.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    hamiltonian: ComplexMatrix,
    jumps: Vec<ComplexMatrix>,
    rates: Vec<f64>,
    gamma: f64,
    layout: HilbertLayout,
}

impl LindbladModel {
    pub fn new(
        hamiltonian: ComplexMatrix,
        jumps: Vec<ComplexMatrix>,
        gamma: f64,
        layout: HilbertLayout,
    ) -> Result<Self> {
        let rates = vec![1.0; jumps.len()];
        Self::with_rates(hamiltonian, jumps, rates, gamma, layout)
    }

    pub fn with_rates(
        hamiltonian: ComplexMatrix,
        jumps: Vec<ComplexMatrix>,
        rates: Vec<f64>,
        gamma: f64,
        layout: HilbertLayout,
    ) -> Result<Self> {
        let d = layout.dim();
        if hamiltonian.rows() != d || hamiltonian.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "Hamiltonian is {}x{}, layout dimension is {d}",
                hamiltonian.rows(),
                hamiltonian.cols()
            )));
        }
        if !hamiltonian.is_hermitian(1e-10) {
            return Err(Error::InvalidArgument("Hamiltonian is not Hermitian".into()));
        }
        for (k, l) in jumps.iter().enumerate() {
            if l.rows() != d || l.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "jump operator {k} is {}x{}, expected {d}x{d}",
                    l.rows(),
                    l.cols()
                )));
            }
        }
        if rates.len() != jumps.len() {
            return Err(Error::InvalidArgument(format!(
                "{} rates for {} jump operators",
                rates.len(),
                jumps.len()
            )));
        }
        if rates.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
            return Err(Error::InvalidArgument("rates must be finite and nonnegative".into()));
        }
        check_gamma(gamma)?;
        Ok(Self {
            hamiltonian,
            jumps,
            rates,
            gamma,
            layout,
        })
    }

    /// Same Hamiltonian and jumps at a different Γ.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            gamma,
            ..self.clone()
        })
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[ComplexMatrix] {
        &self.jumps
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("gamma must be finite and >= 0, got {gamma}")));
    }
    Ok(())
}

/// `L ρ L† − ½(L†L ρ + ρ L†L)`.
pub fn apply_dissipator(l: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    l.check_square("jump operator")?;
    rho.check_square("density matrix")?;
    l.check_same_shape(rho, "apply_dissipator")?;
    let ld = l.dagger();
    let ll = &ld * l;
    let mut out = &(l * rho) * &ld;
    out -= &(&ll * rho).scale_real(0.5);
    out -= &(rho * &ll).scale_real(0.5);
    Ok(out)
}

/// Direct evaluation of the generator on `rho`.
pub fn apply_generator(model: &LindbladModel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    model.hamiltonian.check_same_shape(rho, "apply_generator")?;
    let mut out = model.hamiltonian.commutator(rho)?.scale(-I);
    for (l, &r) in model.jumps.iter().zip(&model.rates) {
        out += &apply_dissipator(l, rho)?.scale_real(model.gamma * r);
    }
    Ok(out)
}

/// `d²×d²` matrix of the generator acting on column-major flattened `ρ`.
pub fn liouvillian_matrix(model: &LindbladModel) -> ComplexMatrix {
    let d = model.dim();
    let n = d * d;
    let zero = C64::new(0.0, 0.0);

    // G ρ + ρ G† covers the commutator and the anticommutator terms
    let mut g = model.hamiltonian.scale(-I);
    let mut sandwiches = Vec::new();
    for (l, &r) in model.jumps.iter().zip(&model.rates) {
        let w = model.gamma * r;
        if w == 0.0 {
            continue;
        }
        let ll = &l.dagger() * l;
        g -= &ll.scale_real(0.5 * w);
        sandwiches.push((l, w));
    }

    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..d {
        for i in 0..d {
            let p = i + j * d;
            for k in 0..d {
                let gik = g[(i, k)];
                if gik != zero {
                    m[(p, k + j * d)] += gik;
                }
                let gjk = g[(j, k)];
                if gjk != zero {
                    m[(p, i + k * d)] += gjk.conj();
                }
            }
        }
    }
    for (l, w) in sandwiches {
        let nz: Vec<(usize, usize, C64)> = (0..d)
            .flat_map(|i| (0..d).map(move |k| (i, k)))
            .filter_map(|(i, k)| {
                let v = l[(i, k)];
                (v != zero).then_some((i, k, v))
            })
            .collect();
        for &(i, k, a) in &nz {
            for &(j, q, b) in &nz {
                m[(i + j * d, k + q * d)] += a * b.conj() * w;
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{jordan_block, re};

    #[test]
    fn dissipator_action_table() {
        let l = jordan_block(2).unwrap();
        let e = |i: usize, j: usize| {
            let mut m = ComplexMatrix::zeros(2, 2);
            m[(i, j)] = re(1.0);
            m
        };
        assert!(apply_dissipator(&l, &e(0, 0)).unwrap().norm_fro() < 1e-15);
        let d11 = apply_dissipator(&l, &e(1, 1)).unwrap();
        assert!((&d11 - &(&e(0, 0) - &e(1, 1))).norm_fro() < 1e-15);
        let d10 = apply_dissipator(&l, &e(1, 0)).unwrap();
        assert!((&d10 - &e(1, 0).scale_real(-0.5)).norm_fro() < 1e-15);
    }

    #[test]
    fn model_validation() {
        let layout = HilbertLayout::bipartite(2, 1).unwrap();
        let h = ComplexMatrix::from_fn(2, 2, |i, j| re((i + 2 * j) as f64));
        assert!(LindbladModel::new(h, vec![], 1.0, layout.clone()).is_err());
        let h = ComplexMatrix::identity(2);
        assert!(LindbladModel::new(h.clone(), vec![], -1.0, layout.clone()).is_err());
        assert!(LindbladModel::new(h.clone(), vec![ComplexMatrix::identity(3)], 1.0, layout.clone()).is_err());
        assert!(LindbladModel::new(h, vec![], 0.0, layout).is_ok());
    }
}
