use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::matcore::{basis_vector, hermitian_eigvals};
use crate::random::{ginibre, random_generator};

fn tol() -> Tolerances<f64> {
    Tolerances::default()
}

fn number_op(n: usize) -> GeneratingOperator<f64> {
    GeneratingOperator::diagonal((0..n).map(|k| k as f64).collect()).unwrap()
}

fn annihilation(n: usize) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            re((j as f64).sqrt())
        } else {
            re(0.0)
        }
    })
}

/// Independent dual oracle: ternary search of the convex h(λ) using full
/// eigenvalue decompositions of A*A − λG.
fn dual_by_ternary(a: &ComplexMatrix<f64>, g: &GeneratingOperator<f64>, e: f64) -> f64 {
    let m = a.gram();
    let gm = g.to_matrix();
    let h = |l: f64| {
        l * e
            + *hermitian_eigvals(&(&m - &gm.scale_real(l)))
                .unwrap()
                .last()
                .unwrap()
    };
    let mut hi = 1.0;
    while h(2.0 * hi) < h(hi) {
        hi *= 2.0;
    }
    let (mut lo, mut hi) = (0.0, 4.0 * hi);
    for _ in 0..300 {
        let a1 = lo + (hi - lo) / 3.0;
        let a2 = hi - (hi - lo) / 3.0;
        if h(a1) <= h(a2) {
            hi = a2;
        } else {
            lo = a1;
        }
    }
    h(0.5 * (lo + hi)).min(h(0.0))
}

#[test]
fn identity_norm_is_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [1usize, 2, 5, 9] {
        let g = random_generator::<f64, _>(n, 3.0, true, &mut rng);
        for e in [0.01, 1.0, 100.0] {
            let r = enorm(&ComplexMatrix::identity(n), &g, e, &tol()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12, "n={n} e={e}: {}", r.value);
            assert!(g.vector_energy(&r.witness) <= e + 1e-10);
        }
    }
}

#[test]
fn rank_one_ladder_element() {
    let n = 12;
    let g = number_op(n);
    for k in [1usize, 3, 7] {
        let a = ComplexMatrix::outer(&basis_vector(n, 0), &basis_vector(n, k));
        for e in [0.1, 0.5, k as f64] {
            let r = enorm(&a, &g, e, &tol()).unwrap();
            assert!((r.value - (e / k as f64).sqrt()).abs() < 1e-10);
            let back = enorm(&a.adjoint(), &g, e, &tol()).unwrap();
            assert!((back.value - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn tail_projector_witness_binds() {
    let g = number_op(20);
    for (n, e) in [(8usize, 2.0), (5, 0.5), (16, 8.0)] {
        let p = g.tail_projector(n);
        let r = enorm(&p, &g, e, &tol()).unwrap();
        assert!((r.value - (e / n as f64).sqrt()).abs() < 1e-10);
        assert!((g.vector_energy(&r.witness) - e).abs() < 1e-9);
        assert!((crate::matcore::vnorm(&r.witness) - 1.0).abs() < 1e-12);
    }
    let rows = projector_decay(&g, 2.0, &[1, 2, 8, 19], &tol()).unwrap();
    for row in rows {
        assert!((row.computed - row.closed_form).abs() < 1e-10, "{row:?}");
    }
}

#[test]
fn annihilation_operator_witness() {
    let n = 30;
    let g = number_op(n);
    let a = annihilation(n);
    let r = enorm(&a, &g, 2.0, &tol()).unwrap();
    assert!((r.value - 2f64.sqrt()).abs() < 1e-10);
    assert!((g.vector_energy(&r.witness) - 2.0).abs() < 1e-9);
    assert!((crate::matcore::vnorm(&a.mul_vec(&r.witness)) - 2f64.sqrt()).abs() < 1e-9);
    let w = recover_witness(&a, &g, 2.0, r.dual_lambda, &tol()).unwrap();
    assert!((crate::matcore::vnorm(&a.mul_vec(&w)) - 2f64.sqrt()).abs() < 1e-8);
}

#[test]
fn two_level_seminorm_example() {
    let g = GeneratingOperator::diagonal(vec![1.0, 0.0]).unwrap();
    let a = ComplexMatrix::from_real_diag(&[2f64.sqrt(), 1.0]);
    for e in [0.25, 0.5, 1.0] {
        assert!((seminorm(&a, &g, e).unwrap() - 1.0).abs() < 1e-12);
    }
    for e in [2.0f64, 4.0, 10.0] {
        let want = (2.0 * e / (e + 1.0)).sqrt();
        assert!((seminorm(&a, &g, e).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn dual_matches_ternary_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..40 {
        let n = 2 + trial % 7;
        let g = random_generator::<f64, _>(n, 2.0, trial % 2 == 0, &mut rng);
        let a = ginibre::<f64, _>(n, n, &mut rng);
        let e = 0.05 + 1.5 * (trial as f64 / 40.0);
        let r = enorm(&a, &g, e, &tol()).unwrap();
        let oracle = dual_by_ternary(&a, &g, e);
        assert!(
            (r.dual_value - oracle).abs() < 1e-8 * oracle.max(1.0),
            "{trial}: {} vs {oracle}",
            r.dual_value
        );
        assert!(r.gap <= 1e-8 * r.dual_value.max(1.0) && r.converged);
    }
}

#[test]
fn sampling_never_beats_dual() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = random_generator::<f64, _>(4, 1.0, true, &mut rng);
    let a = ginibre::<f64, _>(4, 4, &mut rng);
    let r = enorm(&a, &g, 0.3, &tol()).unwrap();
    let s = enorm_sampled(&a, &g, 0.3, 2000, 1).unwrap();
    assert!(s * s <= r.dual_value + 1e-12);
    assert!(s > 0.5 * r.value);
}

#[test]
fn membership_examples() {
    let n = 25;
    let g = number_op(n);
    let a = annihilation(n);
    let id = ComplexMatrix::identity(n);
    let t = tol();
    assert!(pi_membership(&id, &g, RelativeBoundCert { a: 1.0, b: 0.0 }, &t).unwrap());
    assert!(pi_membership(&a, &g, RelativeBoundCert { a: 0.0, b: 1.0 }, &t).unwrap());
    assert!(!pi_membership(&a, &g, RelativeBoundCert { a: 0.0, b: 0.99 }, &t).unwrap());
    assert!((critical_a(&a, &g, 1.0).unwrap()).abs() < 1e-7);
}

#[test]
fn limits_and_extended_values() {
    let g = GeneratingOperator::<f64>::diagonal(vec![0.0, 0.0, 1.0]).unwrap();
    let a = ComplexMatrix::from_real_diag(&[1.0, 2.0, 3.0]);
    assert!((ground_limit(&a, &g).unwrap() - 2.0).abs() < 1e-12);
    assert!((enorm_value(&a, &g, 0.0, &tol()).unwrap() - 2.0).abs() < 1e-12);
    assert!((enorm_value(&a, &g, f64::INFINITY, &tol()).unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn infeasible_budget_rejected() {
    let g = number_op(3);
    let a = ComplexMatrix::identity(3);
    assert!(matches!(enorm(&a, &g, 0.0, &tol()), Err(Error::Infeasible(_))));
    assert!(matches!(enorm(&a, &g, -1.0, &tol()), Err(Error::Infeasible(_))));
    let wrong = ComplexMatrix::<f64>::identity(2);
    assert!(matches!(
        enorm(&wrong, &g, 1.0, &tol()),
        Err(Error::DimMismatch(_))
    ));
}

#[test]
fn log_grid_endpoints() {
    let x = log_grid(0.1, 10.0, 20).unwrap();
    assert_eq!(x.len(), 41);
    assert_eq!(x[0], 0.1);
    assert_eq!(*x.last().unwrap(), 10.0);
    assert!(log_grid(0.0, 1.0, 5).is_err());
    let p = log_points(1.0f64, 100.0, 5).unwrap();
    assert!((p[2] - 10.0).abs() < 1e-12);
}

#[test]
fn transform_identity_and_two_level() {
    let g = GeneratingOperator::diagonal(vec![1.0, 0.0]).unwrap();
    let id = ComplexMatrix::identity(2);
    let r = transform_check(&id, &g, 1.0, &tol()).unwrap();
    assert!(crate::report::all_pass(&r.report), "{:?}", r.report);
    let a = ComplexMatrix::from_real_diag(&[2f64.sqrt(), 1.0]);
    for e in [0.5, 3.0] {
        let r = transform_check(&a, &g, e, &tol()).unwrap();
        assert!(crate::report::all_pass(&r.report), "{:?}", r.report);
    }
}

#[test]
fn profile_flags_nothing_for_enorms() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = random_generator::<f64, _>(5, 2.0, true, &mut rng);
    let a = ginibre::<f64, _>(5, 5, &mut rng);
    let grid = log_grid(0.01, 10.0, 20).unwrap();
    let p = profile(&a, &g, &grid, &tol()).unwrap();
    assert!(p.concavity_violations.is_empty(), "{:?}", p.concavity_violations);
    assert!(matches!(profile(&a, &g, &[], &tol()), Err(Error::EmptyGrid)));
}

#[test]
fn single_precision_runs() {
    let g = GeneratingOperator::<f32>::diagonal((0..8).map(|k| k as f32).collect()).unwrap();
    let p = g.tail_projector(4);
    let t = Tolerances::<f32>::default();
    let r = enorm(&p, &g, 1.0, &t).unwrap();
    assert!((r.value - 0.5).abs() < 1e-3, "{}", r.value);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dual_function_is_convex(seed in 0u64..1_000, l1 in 0.0f64..5.0, l2 in 0.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 + (seed % 5) as usize;
        let g = random_generator::<f64, _>(n, 2.0, true, &mut rng);
        let a = ginibre::<f64, _>(n, n, &mut rng);
        let h1 = dual_function(&a, &g, 0.7, l1).unwrap();
        let h2 = dual_function(&a, &g, 0.7, l2).unwrap();
        let hm = dual_function(&a, &g, 0.7, 0.5 * (l1 + l2)).unwrap();
        prop_assert!(hm <= 0.5 * (h1 + h2) + 1e-12 * (1.0 + h1.abs() + h2.abs()));
    }

    #[test]
    fn weak_duality_and_witness(seed in 0u64..1_000, log_e in -2.0f64..1.5) {
        let e = 10f64.powf(log_e);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 + (seed % 8) as usize;
        let g = random_generator::<f64, _>(n, 3.0, seed % 3 == 0, &mut rng);
        let a = ginibre::<f64, _>(n, n, &mut rng);
        let r = enorm(&a, &g, e, &tol()).unwrap();
        prop_assert!(r.primal <= r.dual_value + 1e-12);
        prop_assert!(r.gap <= 1e-8 * r.dual_value.max(1.0));
        prop_assert!(g.vector_energy(&r.witness) <= e + 1e-10);
        prop_assert!((crate::matcore::vnorm(&r.witness) - 1.0).abs() < 1e-12);
        for lam in [0.0, 0.3, 2.0] {
            prop_assert!(r.primal <= dual_function(&a, &g, e, lam).unwrap() + 1e-12);
        }
    }

    #[test]
    fn norm_equivalences(seed in 0u64..1_000, e1 in 0.05f64..2.0, f in 1.01f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 + (seed % 6) as usize;
        let g = random_generator::<f64, _>(n, 2.0, true, &mut rng);
        let a = ginibre::<f64, _>(n, n, &mut rng);
        let e2 = e1 * f;
        let (n1, n2) = (enorm(&a, &g, e1, &tol()).unwrap().value, enorm(&a, &g, e2, &tol()).unwrap().value);
        prop_assert!(n1 <= n2 + 1e-9 && n2 <= f.sqrt() * n1 + 1e-9);
        let s = seminorm(&a, &g, e1).unwrap();
        prop_assert!(0.5f64.sqrt() * n1 <= s + 1e-9 && s <= n1 + 1e-9);
    }

    #[test]
    fn subnormalized_states_do_not_help(seed in 0u64..1_000, r in 0.05f64..1.0) {
        // Scaling a feasible vector down by √r keeps it in the budget; its
        // value never beats the normalized dual.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 3 + (seed % 4) as usize;
        let g = random_generator::<f64, _>(n, 2.0, true, &mut rng);
        let a = ginibre::<f64, _>(n, n, &mut rng);
        let e = 0.4;
        let d = enorm(&a, &g, e, &tol()).unwrap().dual_value;
        for phi in g.sample_feasible_states(e / r, 50, seed) {
            let scaled: Vec<_> = phi.iter().map(|z| z * r.sqrt()).collect();
            prop_assume!(g.vector_energy(&scaled) <= e + 1e-12);
            prop_assert!(crate::matcore::vnorm(&a.mul_vec(&scaled)).powi(2) <= d + 1e-10);
        }
    }
}
