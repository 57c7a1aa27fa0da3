use super::decomposition::BlockDecomposition;
use crate::error::{Error, Result};
use crate::liouville::{apply_dissipator, LindbladModel};
use crate::operators::{jordan_block, kron, null_space, pseudoinverse, ComplexMatrix, HilbertLayout, C64};

const TRACE_TOL: f64 = 1e-9;

/// Inverse of `D = Σ_k r_k D_{l_k ⊗ I}` on operators with vanishing
/// partial trace over `H_0`.
///
/// The preimage is the unique one with `tr_{H_0} y = 0`, so all kernel
/// content `|e⁰⟩⟨e⁰| ⊗ m` is left to the caller. Operators are in block
/// order with `H_0` expressed in the basis the local jumps are given in.
#[derive(Clone, Debug)]
pub struct DissipatorInverse {
    d0: usize,
    d1: usize,
    local_jumps: Vec<(ComplexMatrix, f64)>,
    /// `[D_0; tr]⁺`, with `D_0` the `d0²×d0²` superoperator on `H_0`.
    pinv: ComplexMatrix,
}

fn local_superoperator(jumps: &[(ComplexMatrix, f64)], d0: usize) -> Result<ComplexMatrix> {
    let n = d0 * d0;
    let mut s = ComplexMatrix::zeros(n, n);
    for q in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[q] = C64::new(1.0, 0.0);
        let x = ComplexMatrix::unvectorize(&e, d0)?;
        let mut y = ComplexMatrix::zeros(d0, d0);
        for (l, r) in jumps {
            y += &apply_dissipator(l, &x)?.scale_real(*r);
        }
        s.set_col(q, &y.vectorize());
    }
    Ok(s)
}

impl DissipatorInverse {
    /// From jumps acting on `H_0` alone, each with its rate.
    ///
    /// Fails unless the kernel of the local dissipator is exactly
    /// `span{|e⁰⟩⟨e⁰|}`.
    pub fn from_local_jumps(jumps: Vec<(ComplexMatrix, f64)>, d1: usize) -> Result<Self> {
        let d0 = jumps
            .first()
            .map(|(l, _)| l.rows())
            .ok_or_else(|| Error::InvalidArgument("no jump operators".into()))?;
        if jumps.iter().any(|(l, _)| l.rows() != d0 || l.cols() != d0) {
            return Err(Error::DimensionMismatch("local jumps differ in dimension".into()));
        }
        let s = local_superoperator(&jumps, d0)?;
        let ker = null_space(&s, 1e-12)?;
        if ker.cols() != 1 {
            return Err(Error::DegenerateDarkSpace { dimension: ker.cols() });
        }
        let k = ker.col(0);
        // the kernel vector must be |e0⟩⟨e0|, i.e. flattened index 0 only
        let off: f64 = k.iter().skip(1).map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if off > 1e-9 {
            return Err(Error::DegenerateDarkSpace { dimension: 1 });
        }
        let n = d0 * d0;
        let mut aug = ComplexMatrix::zeros(n + 1, n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = s[(i, j)];
            }
        }
        for e in 0..d0 {
            aug[(n, e + e * d0)] = C64::new(1.0, 0.0);
        }
        Ok(Self {
            d0,
            d1,
            local_jumps: jumps,
            pinv: pseudoinverse(&aug)?,
        })
    }

    /// Single jump `J_{0,d0}` with unit rate.
    pub fn jordan(d0: usize, d1: usize) -> Result<Self> {
        Self::from_local_jumps(vec![(jordan_block(d0)?, 1.0)], d1)
    }

    /// From a model's jumps, expressed in the rotated frame of `decomp`.
    ///
    /// Each jump must take the form `l ⊗ I` there.
    pub fn from_model(model: &LindbladModel, decomp: &BlockDecomposition) -> Result<Self> {
        let (d0, d1) = (decomp.d0, decomp.d1);
        let mut local = Vec::new();
        for (index, (l, &r)) in model.jumps().iter().zip(model.rates()).enumerate() {
            if r == 0.0 {
                continue;
            }
            let lr = decomp.to_rotated(l)?;
            let l0 = ComplexMatrix::from_fn(d0, d0, |e, f| lr[(e * d1, f * d1)]);
            let dev = (&lr - &kron(&l0, &ComplexMatrix::identity(d1))).norm_fro();
            if dev > 1e-10 * l.norm_fro().max(1.0) {
                return Err(Error::JumpOutsideH0 { index });
            }
            local.push((l0, r));
        }
        Self::from_local_jumps(local, d1)
    }

    pub fn d0(&self) -> usize {
        self.d0
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn local_jumps(&self) -> &[(ComplexMatrix, f64)] {
        &self.local_jumps
    }

    /// Exactly one local jump, nilpotent of full index `d0`.
    pub fn is_single_jordan_chain(&self) -> bool {
        if self.local_jumps.len() != 1 {
            return false;
        }
        let l = &self.local_jumps[0].0;
        let mut p = ComplexMatrix::identity(self.d0);
        for _ in 0..self.d0 - 1 {
            p = &p * l;
        }
        let scale = l.norm_fro().powi(self.d0 as i32 - 1).max(f64::MIN_POSITIVE);
        p.norm_fro() > 1e-8 * scale && (&p * l).norm_fro() <= 1e-10 * scale * l.norm_fro()
    }

    fn check_dim(&self, x: &ComplexMatrix) -> Result<()> {
        let n = self.d0 * self.d1;
        if x.rows() != n || x.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, expected {n}x{n}",
                x.rows(),
                x.cols()
            )));
        }
        Ok(())
    }

    /// Forward action `D x`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(x)?;
        let d1 = self.d1;
        let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
        for (l, r) in &self.local_jumps {
            let big = kron(l, &ComplexMatrix::identity(d1));
            out += &apply_dissipator(&big, x)?.scale_real(*r);
        }
        Ok(out)
    }

    /// `max |tr_{H_0} x|` over the `d1×d1` entries.
    pub fn partial_trace_defect(&self, x: &ComplexMatrix) -> f64 {
        let d1 = self.d1;
        let mut worst: f64 = 0.0;
        for a in 0..d1 {
            for b in 0..d1 {
                let s: C64 = (0..self.d0).map(|e| x[(e * d1 + a, e * d1 + b)]).sum();
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    /// `D⁻¹ x`, failing when `tr_{H_0} x ≠ 0`.
    pub fn inverse(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(x)?;
        let residual = self.partial_trace_defect(x);
        if residual > TRACE_TOL * x.max_abs().max(1.0) {
            return Err(Error::NotInImage { residual });
        }
        Ok(self.inverse_unchecked(x))
    }

    /// Least-squares preimage, with no precondition check.
    pub(crate) fn inverse_unchecked(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let (d0, d1) = (self.d0, self.d1);
        let n = d0 * d0;
        let mut y = ComplexMatrix::zeros(d0 * d1, d0 * d1);
        let mut rhs = vec![C64::new(0.0, 0.0); n + 1];
        for a in 0..d1 {
            for b in 0..d1 {
                for f in 0..d0 {
                    for e in 0..d0 {
                        rhs[e + f * d0] = x[(e * d1 + a, f * d1 + b)];
                    }
                }
                for e in 0..d0 {
                    for f in 0..d0 {
                        let row = self.pinv.row(e + f * d0);
                        let v: C64 = row.iter().zip(&rhs).map(|(p, q)| p * q).sum();
                        y[(e * d1 + a, f * d1 + b)] = v;
                    }
                }
            }
        }
        y
    }
}

/// `D⁻¹ x` for the single jump `J_{0,d0}` on `H_0` in the layout's own
/// factor basis; `x` is a full-space operator.
pub fn dissipator_inverse(x: &ComplexMatrix, layout: &HilbertLayout) -> Result<ComplexMatrix> {
    let inv = DissipatorInverse::jordan(layout.d0(), layout.d1())?;
    let y = inv.inverse(&layout.to_block_order(x)?)?;
    layout.from_block_order(&y)
}
