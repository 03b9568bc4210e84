//! The ten acceptance criteria as library functions, shared by the
//! `acceptance` test target and `qpagerank validate`.
//!
//! Each check returns a [`Criterion`] with a one-line summary of the worst
//! observed quantity against its threshold; thresholds are fixed here and
//! never adjusted per fixture.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fixtures::{self, Fixture, ALPHA, DANGLING_CHAIN, K3_BREAKING, K3_PRESERVING, TWO_CYCLE};
use crate::graph::{build_google, classical_pagerank, DirectedGraph, GoogleMatrix, MatrixSeries};
use crate::linalg::{c, hungarian, spectral_norm, sym_eigen, CVec, NormalEigen, RMat};
use crate::oracle::{coeff_from_samples, dyadic_grid, evaluate_at, iq_complex, loglog_slope, OracleContext};
use crate::perturbation::{error_bounds, projection_series, t_series, BoundLedger, Route, WalkExpansion};
use crate::spectral::{build_t, eigendecompose, eigendecompose_matrix, DEFAULT_CLUSTER_TOL};
use crate::szegedy::{
    average_pagerank, build_walk, build_walk_capped, he_eigenpairs, limit_pagerank, mixing_bound, mu_of, quantum_pagerank,
    uniform_state, Branch, Variant, DEFAULT_DIM_CAP,
};

/// Seed for every randomized criterion.
pub const SEED: u64 = 0x5eed_0001;

#[derive(Debug, Clone)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

fn finish(id: usize, name: &'static str, outcome: Result<(bool, String)>) -> Criterion {
    match outcome {
        Ok((passed, detail)) => Criterion { id, name, passed, detail },
        Err(e) => Criterion { id, name, passed: false, detail: format!("error: {e}") },
    }
}

/// Runs every criterion in order with the default seed.
pub fn run_all() -> Vec<Criterion> {
    run_seeded(SEED)
}

/// Runs every criterion; `seed` drives the randomized ones (1, 3 and 6).
pub fn run_seeded(seed: u64) -> Vec<Criterion> {
    vec![
        unitarity(seed),
        spectral_map(),
        conservation(seed),
        average_convergence(),
        order_consistency(),
        first_order_closed_form(seed),
        degenerate_reduction(),
        coefficient_cross_validation(),
        bound_chain(),
        classical_baseline(),
    ]
}

/// Admissible graph on 2..=8 nodes; dangling nodes allowed.
pub fn random_google(rng: &mut ChaCha8Rng) -> Result<GoogleMatrix> {
    let n = rng.gen_range(2..=8);
    let edges: Vec<(usize, usize)> = (1..=n)
        .flat_map(|s| (1..=n).map(move |d| (s, d)))
        .filter(|&(s, d)| s != d)
        .filter(|_| rng.gen_bool(0.4))
        .collect();
    build_google(&DirectedGraph::new(n, edges)?, ALPHA, None)
}

/// One perturbation order with zero row sums and entries at most `scale`.
pub fn random_term(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> RMat {
    let mut m = RMat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    for r in 0..n {
        let mean = m.row(r).mean();
        for x in m.row_mut(r).iter_mut() {
            *x -= mean;
        }
    }
    let peak = m.amax();
    if peak > 0.0 {
        m *= scale / peak;
    }
    m
}

/// 1. `U†U = I` within 1e-10 and `⟨ψ_j|ψ_k⟩ = δ_jk` within 1e-12.
pub fn unitarity(seed: u64) -> Criterion {
    let run = || -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut worst_u, mut worst_psi) = (0.0f64, 0.0f64);
        for _ in 0..20 {
            let ops = build_walk(&random_google(&mut rng)?)?;
            let d = ops.u.nrows();
            worst_u = worst_u.max((ops.u.transpose() * &ops.u - RMat::identity(d, d)).amax());
            worst_psi = worst_psi.max((ops.psi.transpose() * &ops.psi - RMat::identity(ops.n, ops.n)).amax());
        }
        Ok((worst_u <= 1e-10 && worst_psi <= 1e-12, format!("20 graphs, max|U†U−I| = {worst_u:.2e}, max|ψ†ψ−I| = {worst_psi:.2e}")))
    };
    finish(1, "unitarity and basis", run())
}

/// 2. Every `H_e` eigenvalue of `U` is `λ ± i√(1−λ²)` for an eigenvalue `λ` of
/// `T`, cross-checked against a dense eigendecomposition of the full `U`.
pub fn spectral_map() -> Criterion {
    let run = || -> Result<(bool, String)> {
        let mut worst = 0.0f64;
        let mut count = 0;
        for f in fixtures::ALL {
            let g = f.google()?;
            let ops = build_walk(&g)?;
            let spec = eigendecompose(&build_t(&g), DEFAULT_CLUSTER_TOL);
            let ws = he_eigenpairs(&ops, &spec)?;
            let dense = NormalEigen::from_real(&ops.u, DEFAULT_CLUSTER_TOL);
            let u = ops.u.map(c);
            for p in &ws.pairs {
                let map = spec
                    .raw
                    .iter()
                    .flat_map(|&l| {
                        // λ = ±1 carries rounding that √(1−λ²) would amplify to √ε.
                        let branches = if 1.0 - l.abs() < DEFAULT_CLUSTER_TOL {
                            [Branch::Fixed, Branch::Fixed]
                        } else {
                            [Branch::Plus, Branch::Minus]
                        };
                        let l = if 1.0 - l.abs() < DEFAULT_CLUSTER_TOL { l.signum() } else { l };
                        branches.map(|b| (mu_of(l, b) - p.mu).norm())
                    })
                    .fold(f64::INFINITY, f64::min);
                let in_dense = dense.values.iter().map(|&z| (z - p.mu).norm()).fold(f64::INFINITY, f64::min);
                let residual = (&u * &p.vec - &p.vec * p.mu).norm();
                worst = worst.max(map).max(in_dense).max(residual);
                count += 1;
            }
        }
        Ok((worst <= 1e-8, format!("{count} H_e eigenpairs on {} fixtures, worst deviation {worst:.2e}", fixtures::ALL.len())))
    };
    finish(2, "spectral map", run())
}

/// 3. `Σ_i I_q(i, m)` is constant in `m ≤ 64` for the norm variant.
pub fn conservation(seed: u64) -> Criterion {
    let run = || -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let mut graphs: Vec<GoogleMatrix> = fixtures::ALL.iter().map(|f| f.google()).collect::<Result<_>>()?;
        for _ in 0..5 {
            graphs.push(random_google(&mut rng)?);
        }
        let mut worst = 0.0f64;
        for g in &graphs {
            let ops = build_walk(g)?;
            let ws = he_eigenpairs(&ops, &eigendecompose(&build_t(g), DEFAULT_CLUSTER_TOL))?;
            let psi0 = uniform_state(&ops);
            let total = |m: u64| -> Result<f64> {
                (1..=g.n).map(|i| quantum_pagerank(&ws, &psi0, i, m, Variant::Norm)).sum()
            };
            let base = total(0)?;
            for m in 1..=64 {
                worst = worst.max((total(m)? - base).abs());
            }
        }
        Ok((worst <= 1e-8, format!("{} graphs, m ≤ 64, max drift {worst:.2e}", graphs.len())))
    };
    finish(3, "conservation (norm variant)", run())
}

/// 4. `|Ī_q(t, i) − I_∞(i)| ≤ mixing_bound(t)` on the 2-cycle and `K3`, and the
/// gap at `t = 10⁴` is below 1% of the gap at `t = 10`. The walk starts in
/// `|ψ_1⟩`, which has weight on every eigenphase pair.
pub fn average_convergence() -> Criterion {
    let run = || -> Result<(bool, String)> {
        let mut ok = true;
        let mut notes = Vec::new();
        for f in [&TWO_CYCLE, &K3_BREAKING] {
            let g = f.google()?;
            let ops = build_walk(&g)?;
            let ws = he_eigenpairs(&ops, &eigendecompose(&build_t(&g), DEFAULT_CLUSTER_TOL))?;
            let psi0: CVec = ops.psi.column(0).map(c);
            let gap = |t: u64| -> Result<f64> {
                let mut worst = 0.0f64;
                for i in 1..=g.n {
                    let d = average_pagerank(&ws, &psi0, i, t, Variant::Coherent)?
                        - limit_pagerank(&ws, &psi0, i, Variant::Coherent)?;
                    worst = worst.max(d.abs());
                }
                Ok(worst)
            };
            for t in [10, 100, 1_000, 10_000] {
                ok &= gap(t)? <= mixing_bound(&ws, &psi0, t)?;
            }
            let (g10, g4) = (gap(10)?, gap(10_000)?);
            ok &= g4 < 1e-2 * g10;
            notes.push(format!("{}: gap(10) = {g10:.2e}, gap(10⁴) = {g4:.2e}", graph_name(f)));
        }
        Ok((ok, notes.join("; ")))
    };
    finish(4, "convergence of the average", run())
}

fn graph_name(f: &Fixture) -> &'static str {
    match f.name {
        "k3_breaking" | "k3_preserving" => "k3",
        other => other,
    }
}

/// Time used by the order-consistency check.
pub const SLOPE_M: u64 = 8;
/// Number of grid points in each slope fit.
pub const SLOPE_POINTS: usize = 4;

/// Slopes of `max_i |I_q(χ) − truncation_K(χ)|` for `K = 1, 2, 3` over the
/// largest [`SLOPE_POINTS`] dyadic points `≤ 0.3·r₀` (coherent variant, `m = SLOPE_M`).
pub fn truncation_slopes(gs: &MatrixSeries) -> Result<Vec<Option<f64>>> {
    let ex = WalkExpansion::new(gs, 3, DEFAULT_CLUSTER_TOL)?;
    let led = error_bounds(gs, &ex)?;
    let grid = dyadic_grid(0.3 * led.radius.r0, SLOPE_POINTS);
    if grid.len() < SLOPE_POINTS {
        return Ok(vec![None; 3]);
    }
    let psi0 = uniform_state(&build_walk_capped(&gs.base, DEFAULT_DIM_CAP)?);
    let ctx = OracleContext::new(gs, DEFAULT_CLUSTER_TOL)?;
    let nodes: Vec<usize> = (1..=ex.n).collect();
    let samples = grid
        .iter()
        .map(|&x| evaluate_at(&ctx, x, &psi0, &nodes, &[SLOPE_M], Variant::Coherent))
        .collect::<Result<Vec<_>>>()?;
    let series = nodes
        .iter()
        .map(|&i| ex.iq_series(&psi0, i, SLOPE_M, Variant::Coherent))
        .collect::<Result<Vec<_>>>()?;
    Ok((1..=3)
        .map(|k| {
            let pts: Vec<(f64, f64)> = grid
                .iter()
                .zip(&samples)
                .map(|(&x, s)| {
                    let err = s
                        .iq
                        .iter()
                        .zip(&series)
                        .map(|(&(_, _, v), ser)| (v - ser.truncate(k).evaluate(x)).abs())
                        .fold(0.0, f64::max);
                    (x, err)
                })
                .collect();
            loglog_slope(&pts)
        })
        .collect())
}

/// 5. Slope `≥ K + 0.7` for `K ∈ {1,2,3}` on at least three fixtures, one of
/// them with a degenerate eigenvalue of `T`.
pub fn order_consistency() -> Criterion {
    let run = || -> Result<(bool, String)> {
        let mut passing = Vec::new();
        let mut degenerate_ok = false;
        let mut notes = Vec::new();
        for f in fixtures::ALL {
            let gs = f.series()?;
            let slopes = truncation_slopes(&gs)?;
            let ok = slopes.iter().enumerate().all(|(k, s)| s.is_some_and(|s| s >= (k + 1) as f64 + 0.7));
            let shown: Vec<String> =
                slopes.iter().map(|s| s.map_or("-".to_string(), |s| format!("{s:.2}"))).collect();
            notes.push(format!("{} [{}]", f.name, shown.join(", ")));
            if ok {
                passing.push(f.name);
                let spec = eigendecompose_matrix(&crate::spectral::core_of(&gs.base), DEFAULT_CLUSTER_TOL);
                degenerate_ok |= spec.multiplicities.iter().any(|&m| m > 1);
            }
        }
        Ok((passing.len() >= 3 && degenerate_ok, format!("{} of {} fixtures; {}", passing.len(), fixtures::ALL.len(), notes.join("; "))))
    };
    finish(5, "series order-consistency", run())
}

/// 6. `t_ij^(1) = (g_ij^(1) g_ji + g_ji^(1) g_ij) / (2 t_ij)` on random perturbations.
pub fn first_order_closed_form(seed: u64) -> Criterion {
    let run = || -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 6);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let g = random_google(&mut rng)?;
            let n = g.n;
            let scale = 0.5 * g.entries.min();
            let terms = vec![random_term(&mut rng, n, scale), random_term(&mut rng, n, scale)];
            let gs = MatrixSeries::new(g.entries.clone(), terms, None, None)?;
            let ts = t_series(&gs, 2)?;
            let (g0, g1) = (&gs.base, &gs.terms[0]);
            for i in 0..n {
                for j in 0..n {
                    let t = (g0[(i, j)] * g0[(j, i)]).sqrt();
                    let closed = (g1[(i, j)] * g0[(j, i)] + g1[(j, i)] * g0[(i, j)]) / (2.0 * t);
                    worst = worst.max((ts.coeffs[1][(i, j)] - closed).abs());
                }
            }
        }
        Ok((worst <= 1e-12, format!("20 random perturbations, max deviation {worst:.2e}")))
    };
    finish(6, "first-order closed form", run())
}

/// Matching distance between tree-leaf series of order `k` at `chi` and the
/// directly computed eigenvalues of `T(χ)`.
pub fn leaf_mismatch(gs: &MatrixSeries, k: usize, chi: f64) -> Result<f64> {
    let ex = WalkExpansion::new(gs, k, DEFAULT_CLUSTER_TOL)?;
    let predicted: Vec<f64> = ex.tree.eigenvalue_series().iter().map(|s| s.evaluate(chi)).collect();
    let (direct, _) = sym_eigen(&crate::spectral::core_of(&gs.evaluate(chi)));
    let cost: Vec<Vec<f64>> = predicted.iter().map(|p| direct.iter().map(|d| (p - d).abs()).collect()).collect();
    let assignment = hungarian(&cost);
    Ok(assignment.iter().enumerate().map(|(r, &col)| cost[r][col]).fold(0.0, f64::max))
}

/// 7. Symmetry-breaking `K3`: leaves match `T(10⁻³)` within `10·χ^(K+1)`;
/// symmetry-preserving `K3`: the degenerate eigenvalue splits at level 2.
pub fn degenerate_reduction() -> Criterion {
    let run = || -> Result<(bool, String)> {
        let chi = 1e-3;
        let gs = K3_BREAKING.series()?;
        let mut ok = true;
        let mut notes = Vec::new();
        for k in 1..=3 {
            let err = leaf_mismatch(&gs, k, chi)?;
            let tol = 10.0 * chi.powi(k as i32 + 1);
            ok &= err <= tol;
            notes.push(format!("K={k}: {err:.1e} ≤ {tol:.0e}"));
        }
        let split = |f: &Fixture| -> Result<Vec<Option<usize>>> {
            let ex = WalkExpansion::new(&f.series()?, 3, DEFAULT_CLUSTER_TOL)?;
            Ok((0..ex.spectral.distinct_count())
                .filter(|&h| ex.spectral.multiplicities[h] > 1)
                .map(|h| ex.tree.split_level(h))
                .collect())
        };
        let breaking = split(&K3_BREAKING)?;
        let preserving = split(&K3_PRESERVING)?;
        ok &= !breaking.is_empty() && breaking.iter().all(|&s| s == Some(1));
        ok &= !preserving.is_empty() && preserving.iter().all(|&s| s == Some(2));
        notes.push(format!("split levels: breaking {breaking:?}, preserving {preserving:?}"));
        Ok((ok, notes.join("; ")))
    };
    finish(7, "degenerate reduction", run())
}

/// Sampling radius for Cauchy extraction, as a fraction of `r₀`.
pub const CAUCHY_RADIUS: f64 = 0.4;
/// Samples on the circle.
pub const CAUCHY_SAMPLES: usize = 64;

/// Worst ratio `|c_n(series) − c_n(oracle)| / tolerance` over `n ≤ 3`, every
/// node, `m ∈ {1, 3}` and both variants; tolerance is `max(1e-8, reported error)`.
pub fn coefficient_agreement(gs: &MatrixSeries) -> Result<f64> {
    let ex = WalkExpansion::new(gs, 3, DEFAULT_CLUSTER_TOL)?;
    let led = error_bounds(gs, &ex)?;
    let rho = (CAUCHY_RADIUS * led.radius.r0).min(0.05);
    let psi0 = uniform_state(&build_walk_capped(&gs.base, DEFAULT_DIM_CAP)?);
    let ctx = OracleContext::new(gs, DEFAULT_CLUSTER_TOL)?;
    let mut worst = 0.0f64;
    for variant in [Variant::Coherent, Variant::Norm] {
        for m in [1, 3] {
            for i in 1..=ex.n {
                let series = ex.iq_series(&psi0, i, m, variant)?;
                let values: Vec<Complex64> = (0..CAUCHY_SAMPLES)
                    .map(|k| {
                        let z = Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * k as f64 / CAUCHY_SAMPLES as f64);
                        iq_complex(&ctx, z, &psi0, i, m, variant)
                    })
                    .collect::<Result<_>>()?;
                for n in 1..=3 {
                    let est = coeff_from_samples(&values, rho, n)?;
                    let tol = 1e-8f64.max(est.error);
                    worst = worst.max((est.value - c(series.coeffs[n])).norm() / tol);
                }
            }
        }
    }
    Ok(worst)
}

/// 8. `iq_series` coefficients `n ≤ 3` agree with Cauchy extraction.
pub fn coefficient_cross_validation() -> Criterion {
    let run = || -> Result<(bool, String)> {
        let mut worst = 0.0f64;
        let mut notes = Vec::new();
        for f in fixtures::ALL {
            let r = coefficient_agreement(&f.series()?)?;
            notes.push(format!("{} {r:.2}", f.name));
            worst = worst.max(r);
        }
        Ok((worst <= 1.0, format!("worst |Δc|/tol: {}", notes.join(", "))))
    };
    finish(8, "coefficient cross-validation", run())
}

/// One family of coefficient norms checked against its ledger bound.
#[derive(Debug, Clone)]
pub struct Domination {
    pub quantity: &'static str,
    pub checked: usize,
    /// `max |c_n| / bound_n` (0 when every coefficient vanishes).
    pub worst_ratio: f64,
}

impl Domination {
    fn new(quantity: &'static str) -> Self {
        Domination { quantity, checked: 0, worst_ratio: 0.0 }
    }

    fn add(&mut self, value: f64, bound: f64) {
        self.checked += 1;
        let r = if value == 0.0 { 0.0 } else { value / bound };
        self.worst_ratio = self.worst_ratio.max(r);
    }

    pub fn holds(&self) -> bool {
        self.worst_ratio <= 1.0
    }
}

/// Checks every computed coefficient norm against the ledger.
pub fn dominations(gs: &MatrixSeries, ex: &WalkExpansion, led: &BoundLedger) -> Result<Vec<Domination>> {
    let k = ex.order;
    let n = ex.n;
    let mut psi = Domination::new("psi");
    for l in 1..=k {
        for j in 0..n {
            psi.add(ex.psi_series.coeffs[l].column(j).norm(), led.psi.at(l));
        }
    }
    let mut u = Domination::new("U");
    for l in 1..=k {
        u.add(spectral_norm(&ex.u_series.coeffs[l]), led.u.at(l));
    }
    let mut t = Domination::new("T");
    for l in 1..=k {
        t.add(spectral_norm(&ex.t_series.coeffs[l].map(c)), led.t.at(l));
    }
    let mut tp = Domination::new("P_h");
    for h in 0..ex.spectral.distinct_count() {
        let p = projection_series(&ex.spectral, &ex.t_series, h, k);
        for l in 1..=k {
            tp.add(spectral_norm(&p.coeffs[l]), led.t_projection[h].at(l));
        }
    }
    let mut up = Domination::new("P̂_h");
    for (h, p) in ex.projections.iter().enumerate() {
        for l in 1..=k {
            up.add(spectral_norm(&p.coeffs[l]), led.u_projection[h].at(l));
        }
    }
    let mut q = Domination::new("Q");
    for (r, qr) in ex.q.coeffs.iter().enumerate() {
        q.add(spectral_norm(qr), led.q.at(r + 1));
    }
    let mut vec = Domination::new("|μ⟩");
    let mut mu = Domination::new("μ");
    for (h, cl) in ex.clusters.iter().enumerate() {
        if let Route::EigenPair { mu: ms, vec: vs, .. } = &cl.route {
            for l in 1..=k {
                vec.add(vs.coeffs[l].norm(), led.v.at(l));
                if let Some(env) = led.mu[h] {
                    mu.add(ms.coeffs[l].norm(), env.at(l));
                }
            }
        }
    }
    let mut nq = Domination::new("N_q");
    let psi0 = uniform_state(&build_walk_capped(&gs.base, DEFAULT_DIM_CAP)?);
    for m in [1, 3, 8] {
        let env = led.nq_envelope(m);
        for i in 1..=n {
            let s = ex.nq_series(&psi0, i, m)?;
            for l in 1..=k {
                nq.add(s.coeffs[l].norm(), env.at(l));
            }
        }
    }
    let mut lam = Domination::new("λ_h");
    for (idx, leaf) in ex.tree.leaves.iter().enumerate() {
        for l in 1..=k {
            lam.add(leaf.series.coeffs[l].abs(), led.lambda_bound(idx, l));
        }
    }
    Ok(vec![psi, u, t, tp, up, q, vec, mu, nq, lam])
}

/// 9. Every coefficient norm is within its ledger bound on every fixture.
pub fn bound_chain() -> Criterion {
    let run = || -> Result<(bool, String)> {
        let mut all: Vec<Domination> = Vec::new();
        for f in fixtures::ALL {
            let gs = f.series()?;
            let ex = WalkExpansion::new(&gs, 4, DEFAULT_CLUSTER_TOL)?;
            let led = error_bounds(&gs, &ex)?;
            for d in dominations(&gs, &ex, &led)? {
                match all.iter_mut().find(|a| a.quantity == d.quantity) {
                    Some(a) => {
                        a.checked += d.checked;
                        a.worst_ratio = a.worst_ratio.max(d.worst_ratio);
                    }
                    None => all.push(d),
                }
            }
        }
        let ok = all.iter().all(|d| d.holds() && d.checked > 0);
        let shown: Vec<String> = all.iter().map(|d| format!("{} {:.2}", d.quantity, d.worst_ratio)).collect();
        Ok((ok, format!("orders ≤ 4, worst value/bound: {}", shown.join(", "))))
    };
    finish(9, "bound chain", run())
}

/// 10. Dangling-chain PageRank is `(0.350877, 0.649123)` within 1e-6.
pub fn classical_baseline() -> Criterion {
    let run = || -> Result<(bool, String)> {
        let pr = classical_pagerank(&DANGLING_CHAIN.google()?, 1e-14, 10_000)?;
        let want = [0.350877, 0.649123];
        let err = pr.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        Ok((err <= 1e-6, format!("({:.6}, {:.6}), deviation {err:.1e}", pr[0], pr[1])))
    };
    finish(10, "classical baseline", run())
}
