use dulab_core::numkit::{eig_general, expm_hermitian_i, kron, qr_phase_fixed, vec, ComplexMatrix};
use dulab_core::{LabRng, C64};
use proptest::prelude::*;

fn ginibre(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let mut rng = LabRng::seed_from_u64(seed);
    ComplexMatrix::from_fn(rows, cols, |_, _| rng.complex_gaussian())
}

fn hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let g = ginibre(n, n, seed);
    g.add(&g.adjoint()).scale_real(0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn qr_columns_are_orthonormal(rows in 1usize..200, cols in 1usize..24, seed: u64) {
        prop_assume!(rows >= cols);
        let q = qr_phase_fixed(&ginibre(rows, cols, seed)).unwrap();
        let gram = q.adjoint().matmul(&q);
        prop_assert!(gram.distance(&ComplexMatrix::identity(cols)) < 1e-12);
    }

    #[test]
    fn eigenvalues_sum_to_trace(n in 1usize..40, seed: u64) {
        let m = ginibre(n, n, seed);
        let values = eig_general(&m, false).unwrap().values;
        let sum: C64 = values.iter().sum();
        prop_assert!((sum - m.trace()).norm() <= 1e-10 * m.frobenius_norm());
    }

    #[test]
    fn eigenvalues_multiply_to_determinant(n in 1usize..=16, seed: u64) {
        let m = ginibre(n, n, seed);
        let values = eig_general(&m, false).unwrap().values;
        let product: C64 = values.iter().product();
        let det = m.determinant();
        prop_assert!((product - det).norm() <= 1e-8 * det.norm());
    }

    #[test]
    fn exponential_of_negated_generator_inverts(n in 1usize..20, seed: u64) {
        let h = hermitian(n, seed);
        let u = expm_hermitian_i(&h).unwrap();
        let v = expm_hermitian_i(&h.scale_real(-1.0)).unwrap();
        prop_assert!(u.matmul(&v).distance(&ComplexMatrix::identity(n)) < 1e-10);
    }

    #[test]
    fn vec_identity_pins_tensor_order(seed: u64) {
        let a = ginibre(8, 8, seed);
        let b = ginibre(8, 8, seed ^ 1);
        let rho = ginibre(8, 8, seed ^ 2);
        let lhs = kron(&a, &b.conj()).unwrap().matmul(&vec(&rho).unwrap());
        let rhs = vec(&a.matmul(&rho).matmul(&b.adjoint())).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-12 * (1.0 + rhs.frobenius_norm()));
    }
}

#[test]
fn tall_qr_at_the_largest_supported_shape() {
    let q = qr_phase_fixed(&ginibre(4096, 64, 99)).unwrap();
    let gram = q.adjoint().matmul(&q);
    assert!(gram.distance(&ComplexMatrix::identity(64)) < 1e-12);
}
