#![allow(dead_code)]

use ifc_core::numkit::{spectral_radius_estimate, Mat};
use ifc_core::zoo::{db_to_linear, NetworkScenario, UbpcParams};
use rand::Rng;

pub fn example4_scenario() -> NetworkScenario {
    let g = Mat::from_rows(&[
        [1e-4, 6.82e-7, 3.57e-8, 2.12e-8],
        [1.52e-7, 6.25e-4, 3.51e-6, 1.98e-7],
        [7.67e-9, 2.44e-8, 1.23e-6, 5.16e-9],
        [2.63e-7, 4.82e-8, 2.56e-7, 3.28e-5],
    ])
    .unwrap();
    let targets = [6.0, 6.0, 8.0, 10.0].iter().map(|&d| db_to_linear(d)).collect();
    NetworkScenario::new(g, vec![0.5; 4], targets, Some(vec![0, 1, 2, 3])).unwrap()
}

pub fn example4_params(s: &NetworkScenario) -> UbpcParams {
    UbpcParams::new(vec![1.02, 1.32, 0.88, 1.05], vec![5000.0; 4], s.targets()).unwrap()
}

/// Nonnegative zero-diagonal `k x k` matrix rescaled to spectral radius `rho`.
pub fn matrix_with_radius<R: Rng>(rng: &mut R, k: usize, rho: f64) -> Mat {
    let m = Mat::from_fn(k, k, |i, j| if i == j { 0.0 } else { rng.gen_range(0.0..1.0) });
    let r = spectral_radius_estimate(&m).unwrap();
    Mat::from_fn(k, k, |i, j| m[(i, j)] * rho / r)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}
