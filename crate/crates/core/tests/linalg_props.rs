use proptest::prelude::*;

use qce::linalg::{
    c, hermitian_eig, min_eigenvalue, partial_trace, positive_part, r, tensor_product, trace_norm, Matrix,
};

fn complex_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), rows * cols)
        .prop_map(move |v| Matrix::new(rows, cols, v.into_iter().map(|(re, im)| c(re, im)).collect()).unwrap())
}

fn hermitian(max_dim: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_dim).prop_flat_map(|n| complex_matrix(n, n)).prop_map(|g| (&g + &g.adjoint()).scale(0.5))
}

/// `G G†` normalized to unit trace on `qubits` qubits.
fn density(qubits: usize) -> impl Strategy<Value = Matrix> {
    let n = 1 << qubits;
    complex_matrix(n, n / 2 + 1).prop_filter_map("zero matrix", |g| {
        let rho = &g * &g.adjoint();
        let t = rho.trace().re;
        (t > 1e-6).then(|| rho.scale(1.0 / t))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_norm_is_sum_of_absolute_eigenvalues(m in hermitian(16)) {
        let eig = hermitian_eig(&m).unwrap();
        let expected: f64 = eig.values.iter().map(|l| l.abs()).sum();
        prop_assert!((trace_norm(&m).unwrap() - expected).abs() <= 1e-9);
    }

    #[test]
    fn positive_parts_split_the_matrix(m in hermitian(16)) {
        let plus = positive_part(&m).unwrap();
        let minus = positive_part(&m.scale(-1.0)).unwrap();
        prop_assert!((&(&plus - &minus) - &m).max_abs() <= 1e-9);
        prop_assert!(min_eigenvalue(&plus).unwrap() >= -1e-10);
    }

    #[test]
    fn partial_trace_keeps_trace_and_positivity(
        (n, rho, keep) in (1usize..=5).prop_flat_map(|n| (Just(n), density(n), prop::collection::vec(any::<bool>(), n)))
    ) {
        let keep: Vec<usize> = (0..n).filter(|&q| keep[q]).collect();
        let red = partial_trace(&rho, n, &keep).unwrap();
        prop_assert_eq!(red.rows(), 1 << keep.len());
        prop_assert!((red.trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(red.trace().im.abs() <= 1e-10);
        prop_assert!(min_eigenvalue(&red).unwrap() >= -1e-10);
    }

    #[test]
    fn tensor_product_is_associative(
        a in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| complex_matrix(r, c)),
        b in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| complex_matrix(r, c)),
        d in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| complex_matrix(r, c)),
    ) {
        let left = tensor_product(&tensor_product(&a, &b).unwrap(), &d).unwrap();
        let right = tensor_product(&a, &tensor_product(&b, &d).unwrap()).unwrap();
        prop_assert!((&left - &right).max_abs() <= 1e-12);
    }

    #[test]
    fn two_by_two_eigenvalues_match_characteristic_roots(
        p in -100.0..100.0f64, q in -100.0..100.0f64, re in -100.0..100.0f64, im in -100.0..100.0f64
    ) {
        let m = Matrix::from_rows(&[vec![r(p), c(re, im)], vec![c(re, -im), r(q)]]);
        // λ² − (p+q)λ + (pq − |z|²) = 0
        let mean = (p + q) / 2.0;
        let radius = (((p - q) / 2.0).powi(2) + re * re + im * im).sqrt();
        let eig = hermitian_eig(&m).unwrap();
        prop_assert!((eig.values[0] - (mean + radius)).abs() <= 1e-9);
        prop_assert!((eig.values[1] - (mean - radius)).abs() <= 1e-9);
    }
}
