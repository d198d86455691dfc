//! Property-based checks over randomly generated scalars and matrices.

use optidual::numerics::{
    eig_general, eig_hermitian, hermitian_power, singular_values, Complex64, Matrix, MatrixPower,
};
use proptest::prelude::*;

fn complex_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(
        proptest::collection::vec((-5.0..5.0f64, -5.0..5.0f64), cols),
        rows,
    )
    .prop_map(move |rows_data| {
        let rows_cx: Vec<Vec<Complex64>> = rows_data
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|(re, im)| Complex64::new(re, im))
                    .collect()
            })
            .collect();
        Matrix::from_rows(&rows_cx).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    // |max A - max B| <= max_k |a_k - b_k| for equal-length real lists.
    #[test]
    fn max_difference_lemma(pairs in proptest::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 1..30)) {
        let max_a = pairs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let max_b = pairs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let pointwise = pairs.iter().map(|p| (p.0 - p.1).abs()).fold(0.0, f64::max);
        prop_assert!((max_a - max_b).abs() <= pointwise + 1e-12);
    }
}

proptest! {
    #[test]
    fn spectral_radius_never_exceeds_top_singular_value(m in complex_matrix(3, 3)) {
        let rho = eig_general(&m).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let sigma = singular_values(&m).unwrap()[0];
        prop_assert!(rho <= sigma + 1e-9 * (1.0 + sigma));
    }

    #[test]
    fn singular_values_of_adjoint_match(m in complex_matrix(3, 4)) {
        let a = singular_values(&m).unwrap();
        let b = singular_values(&m.adjoint()).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x));
        }
    }

    // Random PD matrices: inverse square root applied twice is the inverse.
    #[test]
    fn inverse_sqrt_squares_to_inverse(m in complex_matrix(3, 3)) {
        let pd = m.adjoint().mul(&m).add(&Matrix::identity(3));
        let half = hermitian_power(&pd, MatrixPower::InverseSqrt).unwrap();
        let inv = hermitian_power(&pd, MatrixPower::Inverse).unwrap();
        let twice = half.mul(&half);
        prop_assert!(twice.sub(&inv).max_abs() <= 1e-9 * (1.0 + inv.max_abs()));
    }

    // Eigendecomposition reconstructs Hermitian inputs.
    #[test]
    fn hermitian_reconstruction(m in complex_matrix(4, 4)) {
        let h = m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0));
        let (eigs, v) = eig_hermitian(&h, 1e-9 * (1.0 + h.max_abs())).unwrap();
        let mut rebuilt = Matrix::zeros(4, 4);
        for (k, &l) in eigs.iter().enumerate() {
            let col = v.column(k);
            rebuilt = rebuilt.add(&Matrix::outer(&col, &col).scale(Complex64::new(l, 0.0)));
        }
        prop_assert!(rebuilt.sub(&h).max_abs() <= 1e-10 * (1.0 + h.max_abs()));
    }
}
