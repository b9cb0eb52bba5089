mod common;

use common::{example4_params, example4_scenario, matrix_with_radius, rel_close};
use ifc_core::certify::{certify_linear, certify_ubpc, convergence_time_bound};
use ifc_core::engine::{
    async_modulus, empirical_rate, envelope_check, measured_convergence_time, reference_fixed_point,
    run_async, run_sync, AsyncSchedule, StopReason,
};
use ifc_core::numkit::{solve_linear_fixed_point, spectral_radius_estimate};
use ifc_core::zoo::{ubpc_if, with_class, LinearIf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn certified_linear(seed: u64, k: usize) -> (LinearIf, f64, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = rng.gen_range(0.3..0.9);
    let m = matrix_with_radius(&mut rng, k, rho);
    let n = (0..k).map(|_| rng.gen_range(0.1..2.0)).collect();
    let cert = certify_linear(&m).unwrap();
    (LinearIf::new(m, n).unwrap(), cert.c, cert.v)
}

fn ceil_bound(c: f64, e0: f64, d: usize) -> f64 {
    convergence_time_bound(c, e0, 1e-6 * e0, d).unwrap().ceil()
}

#[test]
fn sync_matches_linear_oracle_and_envelope() {
    for seed in 0..20 {
        let (f, c, v) = certified_linear(seed, 5);
        let exact = solve_linear_fixed_point(f.matrix(), f.offset()).unwrap();
        let p_star = reference_fixed_point(&f, &[0.0; 5], 100_000).unwrap();
        for (a, b) in p_star.iter().zip(&exact) {
            assert!(rel_close(*a, *b, 1e-11));
        }
        let t = run_sync(&f, &[0.0; 5], 1e-12, 100_000).unwrap();
        let e = t.errors(&p_star, &v).unwrap();
        assert!(envelope_check(&e, c).passed);
        let td = measured_convergence_time(&e, 1e-6 * e[0]).unwrap();
        assert!(td as f64 <= ceil_bound(c, e[0], 0));
    }
}

#[test]
fn async_agrees_with_sync_and_keeps_async_envelope() {
    for seed in 0..10 {
        let (f, c, v) = certified_linear(100 + seed, 4);
        let p_star = reference_fixed_point(&f, &[0.0; 4], 100_000).unwrap();
        let p0 = vec![3.0; 4];
        for d in [1, 2, 5] {
            let t = run_async(&f, &p0, &AsyncSchedule::bounded(4, d, seed), 1e-13, 100_000).unwrap();
            assert_eq!(t.stop, StopReason::Tolerance);
            for (a, b) in t.final_power().iter().zip(&p_star) {
                assert!(rel_close(*a, *b, 1e-6));
            }
            let e = t.errors(&p_star, &v).unwrap();
            let cbar = async_modulus(c, d);
            assert!(envelope_check(&e, cbar).passed, "seed {seed} D {d}");
            let td = measured_convergence_time(&e, 1e-6 * e[0]).unwrap();
            assert!(td as f64 <= ceil_bound(c, e[0], d));
        }
    }
}

#[test]
fn total_async_reaches_fixed_point() {
    let (f, _, _) = certified_linear(7, 5);
    let p_star = reference_fixed_point(&f, &[0.0; 5], 100_000).unwrap();
    for seed in 0..5 {
        let t = run_async(&f, &[0.0; 5], &AsyncSchedule::total(5, seed), 1e-13, 1_000_000).unwrap();
        assert!(t.converged());
        for (a, b) in t.final_power().iter().zip(&p_star) {
            assert!(rel_close(*a, *b, 1e-6));
        }
        // staleness is unbounded across the run
        assert!(t.staleness.iter().max().unwrap() > &5);
    }
}

#[test]
fn linear_rate_matches_spectral_radius() {
    for seed in 0..10 {
        let (f, _, _) = certified_linear(200 + seed, 5);
        let rho = spectral_radius_estimate(f.matrix()).unwrap();
        let p_star = reference_fixed_point(&f, &[0.0; 5], 100_000).unwrap();
        let t = run_sync(&f, &[0.0; 5], 1e-15, 100_000).unwrap();
        let r = empirical_rate(&t, &p_star).unwrap();
        assert!((r.rate - rho).abs() < 1e-2, "rate {} rho {rho}", r.rate);
    }
}

#[test]
fn example4_sync_and_async_envelopes() {
    let s = example4_scenario();
    let params = example4_params(&s);
    let cert = certify_ubpc(&s, &params).unwrap();
    let f = with_class(ubpc_if(&s, &params).unwrap(), cert.class());
    let p0 = vec![0.0; 4];
    let p_star = reference_fixed_point(&f, &p0, 100_000).unwrap();
    let t = run_sync(&f, &p0, 1e-10, 100_000).unwrap();
    assert!(t.converged());
    let e = t.errors(&p_star, &cert.v).unwrap();
    assert!(envelope_check(&e, cert.c).passed);
    for seed in 0..3 {
        let t = run_async(&f, &p0, &AsyncSchedule::bounded(4, 3, seed), 1e-10, 100_000).unwrap();
        let e = t.errors(&p_star, &cert.v).unwrap();
        assert!(envelope_check(&e, async_modulus(cert.c, 3)).passed);
    }
}

#[test]
fn traces_are_deterministic() {
    let (f, _, _) = certified_linear(9, 4);
    let sched = AsyncSchedule::bounded(4, 5, 31).with_update_prob(0.7);
    let a = run_async(&f, &[1.0; 4], &sched, 1e-12, 50_000).unwrap();
    let b = run_async(&f, &[1.0; 4], &sched, 1e-12, 50_000).unwrap();
    assert_eq!(a, b);
    let bits = |t: &ifc_core::engine::IterationTrace| -> Vec<u64> {
        t.powers.iter().flatten().map(|x| x.to_bits()).collect()
    };
    assert_eq!(bits(&a), bits(&b));
}
