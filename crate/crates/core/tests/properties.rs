use num_complex::Complex64;
use proptest::prelude::*;
use valdist_core::averages::{self, Statistic};
use valdist_core::fourier::{self, MTildeFunction};
use valdist_core::local_factors::{m_local_factor, q_local_factor_mode, q_tilde};
use valdist_core::LambdaMode;

const SMALL_PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

fn any_mode() -> impl Strategy<Value = LambdaMode> {
    prop_oneof![Just(LambdaMode::LogL), Just(LambdaMode::LogDerivative)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn m_factor_is_bounded(i in 0usize..10, sigma in 0.55f64..2.0, x in -5.0f64..5.0) {
        let v = m_local_factor(SMALL_PRIMES[i], sigma, x, 200).unwrap();
        prop_assert!(v.value.norm() <= 1.0 + v.tail_bound + 1e-12);
    }

    #[test]
    fn q_factor_is_bounded(i in 0usize..10, big in 0u64..3, sigma in 0.51f64..3.0, x in -20.0f64..20.0, mode in any_mode()) {
        let p = SMALL_PRIMES[i] + big * 1_000_000_000_000;
        let p = if big == 0 { p } else { next_prime(p) };
        prop_assert!(q_local_factor_mode(p, sigma, x, mode).norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn q_tilde_is_conjugate_symmetric(sigma in 0.8f64..2.0, x in 0.0f64..3.0, mode in any_mode()) {
        let a = q_tilde(sigma, x, 1e-6, mode).unwrap().value;
        let b = q_tilde(sigma, -x, 1e-6, mode).unwrap().value;
        prop_assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn dirichlet_average_is_conjugate_symmetric(x in 0.0f64..4.0, sigma in 0.6f64..2.0) {
        let v = averages::dirichlet_average_many(101, sigma, &[x, -x], 13.0).unwrap();
        prop_assert!((v[0] - v[1].conj()).norm() < 1e-12);
    }
}

fn next_prime(mut n: u64) -> u64 {
    while !valdist_core::primes::is_prime(n) {
        n += 1;
    }
    n
}

#[test]
fn averages_at_zero_frequency_are_one() {
    let one = Complex64::new(1.0, 0.0);
    assert_eq!(averages::dirichlet_average(1009, 1.0, 0.0, 13.0).unwrap(), one);
    let t = averages::torus_mc(1.0, 13.0, &Statistic::Psi(vec![0.0]), 10_000, 1).unwrap();
    assert_eq!(t.mean[0], one);
    assert_eq!(t.standard_error[0], 0.0);
    let q = averages::quadratic_average(1000, 1.0, 0.0, LambdaMode::LogL, averages::Via::Oracle).unwrap();
    assert_eq!(q.values[0], one);
}

#[test]
fn sampled_grid_is_normalized_and_symmetric() {
    let f = MTildeFunction::new(1.0, 13.0).unwrap();
    let grid = fourier::sample_characteristic(&f, 40.0, 1025).unwrap();
    assert!((grid.at_zero() - 1.0).norm() < 1e-12);
    assert!(grid.symmetry_defect() < 1e-10);
}

#[test]
fn torus_estimates_are_reproducible() {
    let stat = Statistic::Psi(vec![0.5, 1.0]);
    let a = averages::torus_mc(1.2, 11.0, &stat, 20_000, 77).unwrap();
    let b = averages::torus_mc(1.2, 11.0, &stat, 20_000, 77).unwrap();
    let c = averages::torus_mc(1.2, 11.0, &stat, 20_000, 78).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_ne!(a.mean, c.mean);
}
