use proptest::prelude::*;
use qpagerank::acceptance::{random_google, random_term};
use qpagerank::graph::MatrixSeries;
use qpagerank::linalg::{c, RMat};
use qpagerank::perturbation::t_series;
use qpagerank::spectral::{build_t, eigendecompose, DEFAULT_CLUSTER_TOL};
use qpagerank::szegedy::{build_walk, he_eigenpairs, quantum_pagerank, uniform_state, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn walk_is_orthogonal(seed in any::<u64>()) {
        let g = random_google(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let ops = build_walk(&g).unwrap();
        let d = ops.u.nrows();
        prop_assert!((ops.u.transpose() * &ops.u - RMat::identity(d, d)).amax() < 1e-10);
        prop_assert!((&ops.swap * &ops.swap - RMat::identity(d, d)).amax() == 0.0);
    }

    #[test]
    fn he_pairs_are_eigenpairs(seed in any::<u64>()) {
        let g = random_google(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let ops = build_walk(&g).unwrap();
        let ws = he_eigenpairs(&ops, &eigendecompose(&build_t(&g), DEFAULT_CLUSTER_TOL)).unwrap();
        let u = ops.u.map(c);
        prop_assert_eq!(ws.pairs.len(), ws.hd_basis.ncols());
        for p in &ws.pairs {
            prop_assert!((p.mu.norm() - 1.0).abs() < 1e-12);
            prop_assert!((&u * &p.vec - &p.vec * p.mu).norm() < 1e-8);
        }
    }

    #[test]
    fn norm_variant_conserves_weight(seed in any::<u64>(), m in 0u64..40) {
        let g = random_google(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let ops = build_walk(&g).unwrap();
        let ws = he_eigenpairs(&ops, &eigendecompose(&build_t(&g), DEFAULT_CLUSTER_TOL)).unwrap();
        let psi0 = uniform_state(&ops);
        let total = |m| (1..=g.n).map(|i| quantum_pagerank(&ws, &psi0, i, m, Variant::Norm).unwrap()).sum::<f64>();
        prop_assert!((total(m) - total(0)).abs() < 1e-9);
    }

    #[test]
    fn core_series_sums_to_direct_core(seed in any::<u64>(), chi in -0.2f64..0.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_google(&mut rng).unwrap();
        let scale = 0.5 * g.entries.min();
        let gs = MatrixSeries::new(g.entries.clone(), vec![random_term(&mut rng, g.n, scale)], None, None).unwrap();
        let ts = t_series(&gs, 12).unwrap();
        let gx = gs.evaluate(chi);
        let direct = RMat::from_fn(g.n, g.n, |i, j| (gx[(i, j)] * gx[(j, i)]).sqrt());
        // |χ| ≤ 0.2 keeps every entry ratio below 0.1, so 12 orders reach 1e-12.
        prop_assert!((ts.evaluate(chi) - direct).amax() < 1e-10);
    }
}
