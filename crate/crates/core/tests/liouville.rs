mod common;

use common::*;
use zeno_core::liouville::*;
use zeno_core::models::{bell3_model, minimal_closed_ness, minimal_model, MinimalModelParams};
use zeno_core::operators::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ket(d: usize, i: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::outer(&PureState::basis(d, i).into_amplitudes(), &PureState::basis(d, j).into_amplitudes())
}

fn random_density(r: &mut rand_chacha::ChaCha8Rng, d: usize) -> ComplexMatrix {
    let a = random_matrix(r, d, d);
    let p = &a * &a.dagger();
    let t = p.trace().re;
    p.scale_real(1.0 / t)
}

fn random_model(seed: u64) -> LindbladModel {
    let mut r = rng(seed);
    let layout = HilbertLayout::qubits(2, vec![0]).unwrap();
    let h = random_hermitian(&mut r, 4);
    let jumps = vec![random_matrix(&mut r, 4, 4), random_matrix(&mut r, 4, 4)];
    LindbladModel::with_rates(h, jumps, vec![1.0, 0.4], 1.7, layout).unwrap()
}

fn decay_model(gamma: f64) -> LindbladModel {
    let layout = HilbertLayout::bipartite(2, 1).unwrap();
    LindbladModel::new(ComplexMatrix::zeros(2, 2), vec![sigma_plus()], gamma, layout).unwrap()
}

#[test]
fn dissipator_on_jordan_basis() {
    let l = jordan_block(2).unwrap();
    assert_eq!(apply_dissipator(&l, &ket(2, 0, 0)).unwrap().max_abs(), 0.0);
    let d11 = apply_dissipator(&l, &ket(2, 1, 1)).unwrap();
    assert!((&d11 - &(&ket(2, 0, 0) - &ket(2, 1, 1))).max_abs() < 1e-15);
    let d10 = apply_dissipator(&l, &ket(2, 1, 0)).unwrap();
    assert!((&d10 - &ket(2, 1, 0).scale_real(-0.5)).max_abs() < 1e-15);
}

#[test]
fn dissipator_dimension_mismatch() {
    assert!(apply_dissipator(&sigma_plus(), &ComplexMatrix::identity(3)).is_err());
}

#[test]
fn zero_model_zero_matrix() {
    let layout = HilbertLayout::bipartite(2, 2).unwrap();
    let m = LindbladModel::new(ComplexMatrix::zeros(4, 4), vec![], 1.0, layout).unwrap();
    assert_eq!(liouvillian_matrix(&m).max_abs(), 0.0);
}

#[test]
fn gamma_zero_spectrum_is_imaginary_differences() {
    let m = random_model(1).with_gamma(0.0).unwrap();
    let ev = general_eigenvalues(&liouvillian_matrix(&m)).unwrap();
    let (w, _) = hermitian_eig(m.hamiltonian()).unwrap();
    let mut expect: Vec<f64> = w.iter().flat_map(|a| w.iter().map(move |b| b - a)).collect();
    let mut got: Vec<f64> = ev.iter().map(|z| z.im).collect();
    assert!(ev.iter().all(|z| z.re.abs() < 1e-10));
    expect.sort_by(f64::total_cmp);
    got.sort_by(f64::total_cmp);
    for (a, b) in expect.iter().zip(&got) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn matrix_matches_direct_evaluation() {
    for seed in 0..5 {
        let m = random_model(seed);
        let lm = liouvillian_matrix(&m);
        let mut r = rng(100 + seed);
        let rho = random_matrix(&mut r, 4, 4);
        let direct = apply_generator(&m, &rho).unwrap();
        let via = ComplexMatrix::unvectorize(&lm.apply(&rho.vectorize()).unwrap(), 4).unwrap();
        assert!((&direct - &via).max_abs() < 1e-12);
        // independent evaluation of −i[H,ρ] + Γ Σ r_k D ρ
        let h = m.hamiltonian();
        let mut manual = (&(h * &rho) - &(&rho * h)).scale(c(0.0, -1.0));
        for (l, &rate) in m.jumps().iter().zip(m.rates()) {
            let ldl = &l.dagger() * l;
            let d = &(&(l * &rho) * &l.dagger()) - &(&(&ldl * &rho) + &(&rho * &ldl)).scale_real(0.5);
            manual += &d.scale_real(rate * m.gamma());
        }
        assert!((&manual - &direct).max_abs() < 1e-12);
    }
}

#[test]
fn generator_preserves_trace_and_hermiticity() {
    let m = random_model(7);
    let lm = liouvillian_matrix(&m);
    let mut r = rng(8);
    for _ in 0..20 {
        let rho = random_hermitian(&mut r, 4);
        let out = apply_generator(&m, &rho).unwrap();
        assert!(out.trace().norm() < 1e-12);
        assert!(out.is_hermitian(1e-12));
        let v = lm.apply(&rho.vectorize()).unwrap();
        let tr: C64 = (0..4).map(|i| v[i + 4 * i]).sum();
        assert!(tr.norm() < 1e-12);
    }
}

#[test]
fn model_validation() {
    let layout = HilbertLayout::bipartite(2, 2).unwrap();
    let nh = ComplexMatrix::from_fn(4, 4, |i, j| c(i as f64, j as f64));
    assert!(LindbladModel::new(nh, vec![], 1.0, layout.clone()).is_err());
    let h = ComplexMatrix::identity(4);
    assert!(LindbladModel::new(h.clone(), vec![ComplexMatrix::identity(2)], 1.0, layout.clone()).is_err());
    assert!(LindbladModel::new(h.clone(), vec![], -1.0, layout.clone()).is_err());
    assert!(LindbladModel::new(ComplexMatrix::identity(3), vec![], 1.0, layout.clone()).is_err());
    assert!(LindbladModel::with_rates(h, vec![ComplexMatrix::identity(4)], vec![-0.1], 1.0, layout).is_err());
}

#[test]
fn decay_steady_state_is_dark() {
    for g in [0.1, 1.0, 50.0] {
        let r = ness(&decay_model(g)).unwrap();
        assert!(r.unique);
        assert!((&r.rho - &ket(2, 0, 0)).max_abs() < 1e-12);
        assert!(r.residual < 1e-9);
    }
}

#[test]
fn ness_requires_positive_gamma() {
    assert!(ness(&decay_model(0.0)).is_err());
    assert!(spectrum(&decay_model(0.0)).is_err());
}

#[test]
fn decay_spectrum() {
    let s = spectrum(&decay_model(1.0)).unwrap();
    let expect = [0.0, -0.5, -0.5, -1.0];
    for (z, e) in s.eigenvalues.iter().zip(expect) {
        assert!((z - c(e, 0.0)).norm() < 1e-12, "{z} vs {e}");
    }
    assert!((s.gap - 0.5).abs() < 1e-12);
    assert!((s.tau_relax - 2.0).abs() < 1e-10);
    assert_eq!(s.nullity(), 1);
}

#[test]
fn minimal_model_closed_form_n1() {
    let p = MinimalModelParams::fig4(1);
    let tm = minimal_model(&p).unwrap();
    let r = ness(&tm.model.with_gamma(10.0).unwrap()).unwrap();
    let cf = minimal_closed_ness(&p, 10.0).unwrap();
    assert!(trace_distance(&r.rho, &cf.rho).unwrap() <= 1e-8);
}

#[test]
fn bell_lambda_one_high_fidelity() {
    let tm = bell3_model(1.0).unwrap();
    let r = ness(&tm.model.with_gamma(1000.0).unwrap()).unwrap();
    assert!(r.unique);
    let f = reduced_fidelity(&r.rho, &tm.target, tm.model.layout()).unwrap();
    assert!(f >= 0.99, "{f}");
}

#[test]
fn minimal_gap_scaling() {
    let tm = minimal_model(&MinimalModelParams::fig4(1)).unwrap();
    let gap = |g: f64| spectrum(&tm.model.with_gamma(g).unwrap()).unwrap().gap;
    let slope = (gap(1e4) / gap(1e2)).log10() / 2.0;
    assert!((slope + 1.0).abs() < 0.05, "{slope}");
}

#[test]
fn unique_ness_has_one_null_eigenvalue() {
    let tm = minimal_model(&MinimalModelParams::fig4(1)).unwrap();
    let m = tm.model.with_gamma(3.0).unwrap();
    let r = ness(&m).unwrap();
    let s = spectrum(&m).unwrap();
    assert!(r.unique);
    let near_zero = s.eigenvalues.iter().filter(|z| z.re.abs() <= 1e-8 * s.scale).count();
    assert_eq!(near_zero, 1);
    assert!(s.eigenvalues.iter().all(|z| z.re <= 1e-8 * s.scale));
}

#[test]
fn degenerate_kernel_reported() {
    // H = 0 and L = σ⁺ ⊗ I leaves the H_1 state free
    let layout = HilbertLayout::bipartite(2, 2).unwrap();
    let l = kron(&sigma_plus(), &ComplexMatrix::identity(2));
    let m = LindbladModel::new(ComplexMatrix::zeros(4, 4), vec![l], 1.0, layout).unwrap();
    for method in [NessMethod::FullEigen, NessMethod::InverseIteration] {
        let r = ness_with(&m, method).unwrap();
        assert!(!r.unique);
        assert!(r.nullity >= 2);
        assert!((r.rho.trace().re - 1.0).abs() < 1e-10);
    }
    assert!(spectrum(&m).unwrap().nullity() >= 2);
}

#[test]
fn inverse_iteration_agrees_with_full_eigen() {
    let tm = minimal_model(&MinimalModelParams::fig4(2)).unwrap();
    let m = tm.model.with_gamma(7.0).unwrap();
    let a = ness_with(&m, NessMethod::FullEigen).unwrap();
    let b = ness_with(&m, NessMethod::InverseIteration).unwrap();
    assert!(trace_distance(&a.rho, &b.rho).unwrap() < 1e-9);
    assert!(b.residual < 1e-9);
}

#[test]
fn ness_is_density_matrix() {
    for seed in 0..4 {
        let m = random_model(seed);
        let r = ness(&m).unwrap();
        assert!(r.rho.is_hermitian(1e-12));
        assert!((r.rho.trace().re - 1.0).abs() < 1e-10);
        let (w, _) = hermitian_eig(&r.rho).unwrap();
        assert!(w[0] >= -1e-9);
        let lm = liouvillian_matrix(&m);
        let res = lm.apply(&r.rho.vectorize()).unwrap();
        let norm = res.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm <= 1e-9 * lm.norm_fro());
    }
}

#[test]
fn purity_deficit_values() {
    assert!(purity_deficit(&ket(3, 1, 1)).abs() < 1e-15);
    let mixed = ComplexMatrix::identity(4).scale_real(0.25);
    assert!((purity_deficit(&mixed) - 0.75).abs() < 1e-15);
    let p = MinimalModelParams::fig4(1);
    let tm = minimal_model(&p).unwrap();
    let r = ness(&tm.model.with_gamma(100.0).unwrap()).unwrap();
    let eps = purity_deficit(&r.rho);
    assert!((eps / 2.0e-4 - 1.0).abs() < 0.05, "{eps}");
}

#[test]
fn fidelity_values() {
    let mut r = rng(4);
    let psi = PureState::normalized(random_vector(&mut r, 4)).unwrap();
    assert!((fidelity(&psi.projector(), &psi).unwrap() - 1.0).abs() < 1e-14);
    let mixed = ComplexMatrix::identity(4).scale_real(0.25);
    assert!((fidelity(&mixed, &psi).unwrap() - 0.5).abs() < 1e-14);
    assert!(fidelity(&mixed, &PureState::basis(3, 0)).is_err());

    let p = MinimalModelParams::fig4(1);
    let tm = minimal_model(&p).unwrap();
    let rho = ness(&tm.model.with_gamma(10.0).unwrap()).unwrap().rho;
    let f = fidelity(&rho, &tm.full_target).unwrap();
    assert!((f - 0.95f64.sqrt()).abs() < 1e-6, "{f}");
}

#[test]
fn reduced_fidelity_of_product() {
    let layout = HilbertLayout::bipartite(2, 2).unwrap();
    let t = PureState::normalized(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
    let rho = kron(&ComplexMatrix::identity(2).scale_real(0.5), &t.projector());
    assert!((reduced_fidelity(&rho, &t, &layout).unwrap() - 1.0).abs() < 1e-14);
    assert!((fidelity(&rho, &PureState::basis(2, 0).tensor(&t)).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
}

#[test]
fn trace_distance_basics() {
    let a = ket(2, 0, 0);
    let b = ket(2, 1, 1);
    assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-14);
    assert!(trace_distance(&a, &a).unwrap() < 1e-15);
    let mut r = rng(5);
    let x = random_density(&mut r, 3);
    let y = random_density(&mut r, 3);
    let d = trace_distance(&x, &y).unwrap();
    assert!((0.0..=1.0).contains(&d));
}
