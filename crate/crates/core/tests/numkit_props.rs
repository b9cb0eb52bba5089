use ifc_core::numkit::{
    solve_linear, solve_linear_fixed_point, spectral_radius, weight_vector_for,
    weighted_max_norm_mat, weighted_max_norm_vec, Mat,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn oracle_radius(m: &Mat) -> f64 {
    let n = m.rows();
    let data: Vec<f64> = m.to_rows().concat();
    DMatrix::from_row_slice(n, n, &data)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn nonneg_matrix(max_n: usize) -> impl Strategy<Value = Mat> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(0.0..2.0f64, n * n).prop_map(move |d| Mat::from_fn(n, n, |i, j| d[i * n + j]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectral_radius_matches_eigen_oracle(m in nonneg_matrix(6)) {
        let ours = spectral_radius(&m).unwrap();
        let oracle = oracle_radius(&m);
        prop_assert!(ours.lower <= oracle * (1.0 + 1e-9) + 1e-12);
        prop_assert!(ours.upper >= oracle * (1.0 - 1e-9) - 1e-12);
        prop_assert!((ours.value - oracle).abs() <= 1e-8 * (1.0 + oracle));
    }

    #[test]
    fn weighted_norm_is_induced(m in nonneg_matrix(5), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let n = m.rows();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..10.0)).collect();
        let norm = weighted_max_norm_mat(&m, &v).unwrap();
        // attained at x = v, bounds every other x
        prop_assert!((weighted_max_norm_vec(&m.mul_vec(&v), &v).unwrap() - norm).abs() <= 1e-12 * (1.0 + norm));
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let lhs = weighted_max_norm_vec(&m.mul_vec(&x), &v).unwrap();
        prop_assert!(lhs <= norm * weighted_max_norm_vec(&x, &v).unwrap() * (1.0 + 1e-12) + 1e-300);
        // norm bounds the spectral radius
        prop_assert!(oracle_radius(&m) <= norm * (1.0 + 1e-9));
    }

    #[test]
    fn solve_residual_is_small(m in nonneg_matrix(6), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let n = m.rows();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = Mat::from_fn(n, n, |i, j| m[(i, j)] + if i == j { 3.0 * n as f64 } else { 0.0 });
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = solve_linear(&a, &b).unwrap();
        let r = a.mul_vec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            prop_assert!((ri - bi).abs() <= 1e-12 * (1.0 + a.inf_norm()));
        }
    }

    #[test]
    fn weight_vector_exists_iff_subunit_radius(m in nonneg_matrix(5)) {
        let rho = oracle_radius(&m);
        prop_assume!((rho - 1.0).abs() > 1e-6);
        let res = weight_vector_for(&m, &vec![1.0; m.rows()]);
        if rho < 1.0 {
            let v = res.unwrap();
            prop_assert!(weighted_max_norm_mat(&m, &v).unwrap() < 1.0);
        } else {
            prop_assert!(res.is_err());
        }
    }
}

#[test]
fn fixed_point_of_affine_map() {
    let m = Mat::from_rows(&[[0.0, 0.5], [0.5, 0.0]]).unwrap();
    let p = solve_linear_fixed_point(&m, &[1.0, 1.0]).unwrap();
    assert!((p[0] - 2.0).abs() < 1e-15 && (p[1] - 2.0).abs() < 1e-15);
    let bad = Mat::from_rows(&[[0.0, 2.0], [2.0, 0.0]]).unwrap();
    assert!(solve_linear_fixed_point(&bad, &[1.0, 1.0]).is_err());
}
