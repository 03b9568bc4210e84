use qpagerank::acceptance::{dominations, leaf_mismatch};
use qpagerank::fixtures::{self, DANGLING_CHAIN, K3_BREAKING, TWO_CYCLE};
use qpagerank::oracle::{compare_truncation, dyadic_grid, evaluate_at, OracleContext};
use qpagerank::perturbation::{error_bounds, iq_series_complex, WalkExpansion};
use qpagerank::spectral::DEFAULT_CLUSTER_TOL;
use qpagerank::szegedy::{build_walk, uniform_state, Variant};

#[test]
fn truncation_errors_within_certified_tails() {
    for f in [TWO_CYCLE, DANGLING_CHAIN, K3_BREAKING] {
        let gs = f.series().unwrap();
        let ex = WalkExpansion::new(&gs, 4, DEFAULT_CLUSTER_TOL).unwrap();
        let led = error_bounds(&gs, &ex).unwrap();
        let psi0 = uniform_state(&build_walk(&f.google().unwrap()).unwrap());
        let ctx = OracleContext::new(&gs, DEFAULT_CLUSTER_TOL).unwrap();
        let grid = dyadic_grid(0.3 * led.radius.r0, 4);
        let samples: Vec<_> =
            grid.iter().map(|&x| evaluate_at(&ctx, x, &psi0, &[1], &[2], Variant::Norm).unwrap()).collect();
        let oracle: Vec<(f64, f64)> = samples.iter().map(|s| (s.chi, s.iq[0].2)).collect();
        let series = ex.iq_series(&psi0, 1, 2, Variant::Norm).unwrap();
        let env = led.iq_envelope(2);
        let rep = compare_truncation("iq", &series, &oracle, |x| env.tail(4, x));
        assert!(rep.rows.iter().all(|r| r.within_bound), "{}", f.name);
    }
}

#[test]
fn higher_order_is_pointwise_better() {
    let gs = DANGLING_CHAIN.series().unwrap();
    let ex = WalkExpansion::new(&gs, 2, DEFAULT_CLUSTER_TOL).unwrap();
    let led = error_bounds(&gs, &ex).unwrap();
    let psi0 = uniform_state(&build_walk(&DANGLING_CHAIN.google().unwrap()).unwrap());
    let ctx = OracleContext::new(&gs, DEFAULT_CLUSTER_TOL).unwrap();
    let grid = dyadic_grid(0.3 * led.radius.r0, 5);
    let oracle: Vec<(f64, f64)> = grid
        .iter()
        .map(|&x| (x, evaluate_at(&ctx, x, &psi0, &[2], &[3], Variant::Coherent).unwrap().iq[0].2))
        .collect();
    let s = ex.iq_series(&psi0, 2, 3, Variant::Coherent).unwrap();
    let k1 = compare_truncation("iq", &s.truncate(1), &oracle, |_| None);
    let k2 = compare_truncation("iq", &s, &oracle, |_| None);
    for (a, b) in k1.rows.iter().zip(&k2.rows) {
        assert!(b.abs_error < a.abs_error, "χ = {}", a.chi);
    }
    assert!(k2.slope.unwrap() >= 2.7);
}

#[test]
fn leaves_track_direct_spectrum() {
    for f in fixtures::ALL {
        let gs = f.series().unwrap();
        let ex = WalkExpansion::new(&gs, 3, DEFAULT_CLUSTER_TOL).unwrap();
        let r0 = error_bounds(&gs, &ex).unwrap().radius.r0;
        let chi = (0.1 * r0).min(1e-2);
        let err = leaf_mismatch(&gs, 3, chi).unwrap();
        assert!(err <= 10.0 * chi.powi(4), "{}: {err:e} at χ = {chi:e}", f.name);
    }
}

#[test]
fn iq_coefficients_are_real() {
    for f in fixtures::ALL {
        let gs = f.series().unwrap();
        let ex = WalkExpansion::new(&gs, 4, DEFAULT_CLUSTER_TOL).unwrap();
        let psi0 = uniform_state(&build_walk(&f.google().unwrap()).unwrap());
        for variant in [Variant::Coherent, Variant::Norm] {
            for i in 1..=ex.n {
                let amps = ex.amplitude_series(&psi0, i, 5).unwrap();
                let s = iq_series_complex(&amps, variant);
                assert!(s.coeffs.iter().all(|z| z.im.abs() < 1e-10), "{} node {i}", f.name);
            }
        }
    }
}

#[test]
fn every_fixture_respects_its_ledger() {
    for f in fixtures::ALL {
        let gs = f.series().unwrap();
        let ex = WalkExpansion::new(&gs, 4, DEFAULT_CLUSTER_TOL).unwrap();
        let led = error_bounds(&gs, &ex).unwrap();
        for d in dominations(&gs, &ex, &led).unwrap() {
            assert!(d.holds(), "{}: {} at {:.3}", f.name, d.quantity, d.worst_ratio);
        }
        assert!(led.radius.r0 > 0.0 && led.radius.r0 <= led.radius.r1);
    }
}
