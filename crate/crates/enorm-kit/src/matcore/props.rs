use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::random::{ginibre, haar_unitary, random_density, random_hermitian};

fn sub_frob(a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>) -> f64 {
    (a - b).frobenius_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decompositions_reconstruct(seed in 0u64..10_000, n in 2usize..=16, m in 2usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian::<f64, _>(n, &mut rng);
        let e = hermitian_eig(&h).unwrap();
        prop_assert!(sub_frob(&e.reconstruct(), &h) <= 1e-10 * h.frobenius_norm());

        let a = ginibre::<f64, _>(n, m, &mut rng);
        let d = svd(&a).unwrap();
        prop_assert!(sub_frob(&d.reconstruct(), &a) <= 1e-10 * a.frobenius_norm());

        let sq = ginibre::<f64, _>(n, n, &mut rng);
        let (w, p) = polar(&sq).unwrap();
        prop_assert!(sub_frob(&(&w * &p), &sq) <= 1e-10 * sq.frobenius_norm());

        let rho = random_density::<f64, _>(n, &mut rng);
        let r = sqrtm_psd(&rho, 1e-12).unwrap();
        prop_assert!(sub_frob(&(&r * &r), &rho) <= 1e-10 * rho.frobenius_norm());
    }

    #[test]
    fn trace_norm_subadditive_and_unitarily_invariant(seed in 0u64..10_000, n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ginibre::<f64, _>(n, n, &mut rng);
        let b = ginibre::<f64, _>(n, n, &mut rng);
        let u = haar_unitary::<f64, _>(n, &mut rng);
        let v = haar_unitary::<f64, _>(n, &mut rng);
        let (ta, tb) = (trace_norm(&a).unwrap(), trace_norm(&b).unwrap());
        prop_assert!(trace_norm(&(&a + &b)).unwrap() <= ta + tb + 1e-10);
        let rotated = &(&u * &a) * &v;
        prop_assert!((trace_norm(&rotated).unwrap() - ta).abs() <= 1e-10 * ta.max(1.0));
    }

    #[test]
    fn partial_trace_linear_and_positive(seed in 0u64..10_000, dx in 1usize..=4, dy in 1usize..=4, c in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ginibre::<f64, _>(dx * dy, dx * dy, &mut rng);
        let b = ginibre::<f64, _>(dx * dy, dx * dy, &mut rng);
        let rho = random_density::<f64, _>(dx * dy, &mut rng);
        for keep in [Keep::X, Keep::Y] {
            let lhs = partial_trace(&(&a + &b.scale_real(c)), dx, dy, keep).unwrap();
            let rhs = &partial_trace(&a, dx, dy, keep).unwrap()
                + &partial_trace(&b, dx, dy, keep).unwrap().scale_real(c);
            prop_assert!(sub_frob(&lhs, &rhs) <= 1e-12 * (1.0 + lhs.frobenius_norm()));
            let reduced = partial_trace(&rho, dx, dy, keep).unwrap();
            prop_assert!(lambda_min(&reduced).unwrap() >= -1e-12);
            prop_assert!((reduced.trace().re - 1.0).abs() <= 1e-12);
        }
    }
}
