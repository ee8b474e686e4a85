use std::sync::Arc;

use dualrail_core::dense::{self, max_abs_diff};
use dualrail_core::fock::{FockOperator, ModeRegistry, StateVector};
use dualrail_core::qubit::*;
use dualrail_core::{CMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn two_qubits() -> (Arc<ModeRegistry>, Vec<DualRailQubit>) {
    let r = ModeRegistry::with_modes([("a1", 2), ("b1", 2), ("a2", 2), ("b2", 2)]).unwrap();
    let q = vec![
        DualRailQubit::new(&r, "a1", "b1").unwrap(),
        DualRailQubit::new(&r, "a2", "b2").unwrap(),
    ];
    (Arc::new(r), q)
}

fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let m = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
    });
    dense::expm(&((&m - m.adjoint()) * C64::new(0.5, 0.0)))
}

fn proj(op: &FockOperator, basis: &[usize]) -> CMatrix {
    op.project(basis)
}

#[test]
fn pauli_relations_on_qubit_subspace() {
    let (r, q) = two_qubits();
    let basis = qubit_subspace_basis(&q[..1], &r).unwrap();
    let s = |w| stokes_operator(q[0], w, &r).unwrap();
    let (i, x, y, z) = (s(Stokes::I), s(Stokes::X), s(Stokes::Y), s(Stokes::Z));
    let two_i = C64::new(0.0, 2.0);
    let comm = |a: &FockOperator, b: &FockOperator| {
        a.compose(b).unwrap().sub(&b.compose(a).unwrap()).unwrap()
    };
    let anti = |a: &FockOperator, b: &FockOperator| {
        a.compose(b).unwrap().add(&b.compose(a).unwrap()).unwrap()
    };
    for (a, b, c) in [(&x, &y, &z), (&y, &z, &x), (&z, &x, &y)] {
        assert!(max_abs_diff(&proj(&comm(a, b), &basis), &proj(&c.scale(two_i), &basis)) < 1e-12);
        assert!(max_abs_diff(&proj(&anti(a, b), &basis), &CMatrix::zeros(2, 2)) < 1e-12);
    }
    for p in [&x, &y, &z] {
        let sq = proj(&p.compose(p).unwrap(), &basis);
        assert!(max_abs_diff(&sq, &proj(&i, &basis)) < 1e-12);
    }
    assert!(max_abs_diff(&proj(&i, &basis), &CMatrix::identity(2, 2)) < 1e-12);
    // field forms agree with the matrix map
    assert_eq!(
        x.max_abs_diff(&matrix_to_field(&GateMatrix::pauli_x(), &q[..1], &r).unwrap())
            .unwrap(),
        0.0
    );
}

#[test]
fn xx_equals_identity_under_expectation() {
    let (r, q) = two_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x = stokes_operator(q[0], Stokes::X, &r).unwrap();
    let xx = x.compose(&x).unwrap();
    let id = stokes_operator(q[0], Stokes::I, &r).unwrap();
    let ia = r.index_with(&[(q[0].a, 1)]).unwrap();
    let ib = r.index_with(&[(q[0].b, 1)]).unwrap();
    for _ in 0..50 {
        let (alpha, beta) = (
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        );
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        let mut amps = vec![C64::new(0.0, 0.0); r.dimension()];
        amps[ia] = alpha / norm;
        amps[ib] = beta / norm;
        let psi = StateVector::from_amplitudes(&r, amps).unwrap();
        let lhs = psi.inner(&xx.apply(&psi).unwrap()).unwrap();
        let rhs = psi.inner(&id.apply(&psi).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }
    let plus = StateVector::from_amplitudes(&r, {
        let mut a = vec![C64::new(0.0, 0.0); r.dimension()];
        a[ia] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        a[ib] = a[ia];
        a
    })
    .unwrap();
    assert!((plus.inner(&x.apply(&plus).unwrap()).unwrap().re - 1.0).abs() < 1e-12);
}

#[test]
fn matrix_to_field_homomorphism_on_random_unitaries() {
    let (r, q) = two_qubits();
    let basis = qubit_subspace_basis(&q, &r).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let m1 = GateMatrix::new(random_unitary(&mut rng, 4)).unwrap();
        let m2 = GateMatrix::new(random_unitary(&mut rng, 4)).unwrap();
        let f1 = matrix_to_field(&m1, &q, &r).unwrap();
        let f2 = matrix_to_field(&m2, &q, &r).unwrap();
        let f12 = matrix_to_field(&m1.mul(&m2).unwrap(), &q, &r).unwrap();
        let lhs = f1.compose(&f2).unwrap().project(&basis);
        assert!(max_abs_diff(&lhs, &f12.project(&basis)) < 1e-10);
        assert!(max_abs_diff(&f1.project(&basis), m1.matrix()) < 1e-12);
    }
}

#[test]
fn matrix_to_field_is_linear() {
    let (r, q) = two_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = GateMatrix::new(random_unitary(&mut rng, 4)).unwrap();
    let b = GateMatrix::new(random_unitary(&mut rng, 4)).unwrap();
    let (s, t) = (C64::new(0.3, -1.2), C64::new(2.0, 0.5));
    let combo = GateMatrix::new(a.matrix() * s + b.matrix() * t).unwrap();
    let lhs = matrix_to_field(&combo, &q, &r).unwrap();
    let rhs = matrix_to_field(&a, &q, &r)
        .unwrap()
        .scale(s)
        .add(&matrix_to_field(&b, &q, &r).unwrap().scale(t))
        .unwrap();
    assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-13);
    assert!(matrix_to_field(&a, &q[..1], &r).is_err());
}

#[test]
fn csign_commutation_properties() {
    let (r, q) = two_qubits();
    let basis = qubit_subspace_basis(&q, &r).unwrap();
    let c = csign_field(q[0], q[1], &r).unwrap();
    let z1 = stokes_operator(q[0], Stokes::Z, &r).unwrap();
    let z2 = stokes_operator(q[1], Stokes::Z, &r).unwrap();
    let x2 = stokes_operator(q[1], Stokes::X, &r).unwrap();
    for z in [&z1, &z2] {
        let lhs = c.compose(z).unwrap().project(&basis);
        let rhs = z.compose(&c).unwrap().project(&basis);
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }
    let conj = FockOperator::product(&[&c, &x2, &c])
        .unwrap()
        .project(&basis);
    let z1x2 = z1.compose(&x2).unwrap().project(&basis);
    assert!(max_abs_diff(&conj, &z1x2) < 1e-12);
    let sq = c.compose(&c).unwrap().project(&basis);
    assert!(max_abs_diff(&sq, &CMatrix::identity(4, 4)) < 1e-12);
}
