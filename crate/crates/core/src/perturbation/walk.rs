//! Walk-side expansions: `U(χ)` eigenprojections, the transformation function
//! `V(χ)`, eigenvector and eigenvalue series, and the `N_q`/`I_q` series.
//!
//! `N_q(χ) = Σ_j ⟨j,i|U(χ)^{2m} Π(χ)|ψ(0)⟩`, with `Π(χ)` the total projection
//! onto the perturbed clusters of every unperturbed `U` eigenvalue that meets
//! `H_e`. Total cluster projections are analytic even where individual
//! eigenvalues are not (splitting clusters, and the `μ = ±1` branch points
//! whose clusters also hold `H_d^⊥` vectors). Clusters with a simple `μ`,
//! `|λ| < 1`, go through the eigenpair route
//! `μ(χ)^{2m}⟨μ(χ)|ψ(0)⟩⟨j,i|μ(χ)⟩`; every other cluster goes through
//! `U(χ)^{2m} P̂_h(χ)` directly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::MatrixSeries;
use crate::linalg::{c, CMat, CVec, NormalEigen, RMat, I};
use crate::series::{RealSeries, RealSeriesMatrix, Series, SeriesMatrix, SeriesScalar, SeriesVector};
use crate::spectral::{eigendecompose_matrix, SpectralData};
use crate::szegedy::{build_walk_capped, he_eigenpairs, index, Branch, Variant, WalkSpectrum, DEFAULT_DIM_CAP};

use super::coeffs::{psi_series, t_series, u_series};
use super::kato::{ClusterExpansion, Eigenbasis};
use super::tree::{reduction_tree, EigenvalueTree};

/// `μ(χ) = λ(χ) ± i√(1 − λ(χ)²)` by series composition.
pub fn mu_series(lam: &RealSeries, branch: Branch) -> Result<SeriesScalar> {
    let l0 = lam.coeffs[0];
    if l0.abs() >= 1.0 {
        return Err(Error::Invalid(format!("μ-series needs |λ(0)| < 1, got {l0}")));
    }
    let lc = lam.complexify();
    let one_minus = SeriesScalar::constant(c(1.0), lam.order()).sub(&lc.mul(&lc));
    let root = one_minus.sqrt();
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
        Branch::Fixed => return Err(Error::Invalid("μ-series undefined at the branch point".into())),
    };
    Ok(lc.add(&root.scale_c(I * sign)))
}

/// `μ(χ)^{2m}`.
pub fn a1_series(mu: &SeriesScalar, m: u64) -> SeriesScalar {
    mu.powi((2 * m) as usize, c(1.0))
}

/// Full-space eigendecomposition of `U`, clustered.
#[derive(Debug, Clone)]
pub struct UnitarySpectrum {
    pub basis: Eigenbasis,
}

impl UnitarySpectrum {
    pub fn new(u: &RMat, tol: f64) -> Self {
        UnitarySpectrum { basis: Eigenbasis::from_normal(&NormalEigen::from_real(u, tol), tol) }
    }

    pub fn cluster_count(&self) -> usize {
        self.basis.centers.len()
    }

    pub fn find(&self, mu: Complex64, tol: f64) -> Option<usize> {
        self.basis.centers.iter().position(|&z| (z - mu).norm() < tol)
    }
}

fn series_terms(us: &SeriesMatrix) -> Vec<CMat> {
    us.coeffs[1..].to_vec()
}

/// `P̂_h(χ)` to the order of `us`.
pub fn u_projection_series(spec: &UnitarySpectrum, us: &SeriesMatrix, h: usize) -> SeriesMatrix {
    let mut ex = ClusterExpansion::new(&spec.basis, h, &series_terms(us));
    SeriesMatrix::new(ex.projection_series())
}

/// `Q(χ) = −Σ_h P̂_h(χ) P̂_h'(χ)` over all clusters, to order `K − 1`.
pub fn q_series(projections: &[SeriesMatrix]) -> SeriesMatrix {
    let k = projections[0].order();
    let d = projections[0].coeffs[0].nrows();
    let coeffs = (0..k)
        .map(|r| {
            let mut acc = CMat::zeros(d, d);
            for p in projections {
                for a in 0..=r {
                    acc -= &p.coeffs[a] * &p.coeffs[r + 1 - a] * c((r + 1 - a) as f64);
                }
            }
            acc
        })
        .collect();
    SeriesMatrix::new(coeffs)
}

/// `V' = QV`, `V(0) = I`: `V^(n) = (1/n) Σ_{j<n} Q^(j) V^(n−1−j)`.
pub fn v_series(q: &SeriesMatrix) -> SeriesMatrix {
    let k = q.order() + 1;
    let d = q.coeffs[0].nrows();
    let mut v = vec![CMat::identity(d, d)];
    for n in 1..=k {
        let mut acc = CMat::zeros(d, d);
        for j in 0..n {
            acc += &q.coeffs[j] * &v[n - 1 - j];
        }
        v.push(acc / c(n as f64));
    }
    SeriesMatrix::new(v)
}

/// `|μ(χ)⟩ = V(χ)|μ⟩`.
pub fn eigvec_series(v: &SeriesMatrix, mu_vec: &CVec) -> SeriesVector {
    Series::new(v.coeffs.iter().map(|m| m * mu_vec).collect())
}

#[derive(Debug, Clone)]
pub enum Route {
    /// Simple μ with |λ| < 1.
    EigenPair { pair: usize, mu: SeriesScalar, vec: SeriesVector },
    /// Cluster-operator route through `U(χ)^{2m} P̂_h(χ)`.
    Cluster,
}

#[derive(Debug, Clone)]
pub struct UCluster {
    pub center: Complex64,
    pub multiplicity: usize,
    pub meets_he: bool,
    pub route: Route,
}

/// Every series of the walk for one perturbation, truncated at `order`.
#[derive(Debug, Clone)]
pub struct WalkExpansion {
    pub order: usize,
    pub n: usize,
    pub spectral: SpectralData,
    pub t_series: RealSeriesMatrix,
    pub tree: EigenvalueTree,
    pub psi_series: RealSeriesMatrix,
    pub u_series: SeriesMatrix,
    pub walk: WalkSpectrum,
    pub unitary: UnitarySpectrum,
    pub projections: Vec<SeriesMatrix>,
    pub q: SeriesMatrix,
    pub v: SeriesMatrix,
    pub clusters: Vec<UCluster>,
    /// λ-series for each distinct eigenvalue of `T` whose leaves coincide.
    pub lambda_series: Vec<Option<RealSeries>>,
}

impl WalkExpansion {
    pub fn new(gs: &MatrixSeries, order: usize, cluster_tol: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::Invalid("truncation order must be at least 1".into()));
        }
        let n = gs.n();
        let ts = t_series(gs, order)?;
        let spectral = eigendecompose_matrix(&ts.coeffs[0], cluster_tol);
        let tree = reduction_tree(&spectral, &ts, order)?;
        let ops = build_walk_capped(&gs.base, DEFAULT_DIM_CAP)?;
        let walk = he_eigenpairs(&ops, &spectral)?;
        let psi = psi_series(gs, order)?;
        let us = u_series(gs, order)?.complexify();
        let unitary = UnitarySpectrum::new(&ops.u, cluster_tol);
        let projections: Vec<SeriesMatrix> =
            (0..unitary.cluster_count()).map(|h| u_projection_series(&unitary, &us, h)).collect();
        let q = q_series(&projections);
        let v = v_series(&q);
        let lambda_series: Vec<Option<RealSeries>> = (0..spectral.distinct_count())
            .map(|h| {
                if tree.is_coherent(h, 1e-12) {
                    tree.leaves_of(h).next().map(|l| l.series.clone())
                } else {
                    None
                }
            })
            .collect();
        let mut clusters = Vec::new();
        for h in 0..unitary.cluster_count() {
            let center = unitary.basis.centers[h];
            let multiplicity = unitary.basis.multiplicity(h);
            let members: Vec<usize> = (0..walk.pairs.len())
                .filter(|&p| (walk.pairs[p].mu - center).norm() < cluster_tol * 10.0)
                .collect();
            let meets_he = !members.is_empty();
            let mut route = Route::Cluster;
            if multiplicity == 1 && members.len() == 1 {
                let pair = &walk.pairs[members[0]];
                if pair.branch != Branch::Fixed && spectral.multiplicities[pair.origin] == 1 {
                    let lam = lambda_series[pair.origin].clone().expect("simple eigenvalue has one leaf");
                    let mu = mu_series(&lam, pair.branch)?;
                    let vec = eigvec_series(&v, &pair.vec);
                    route = Route::EigenPair { pair: members[0], mu, vec };
                }
            }
            clusters.push(UCluster { center, multiplicity, meets_he, route });
        }
        Ok(WalkExpansion {
            order,
            n,
            spectral,
            t_series: ts,
            tree,
            psi_series: psi,
            u_series: us,
            walk,
            unitary,
            projections,
            q,
            v,
            clusters,
            lambda_series,
        })
    }

    fn check_node(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.n {
            return Err(Error::Invalid(format!("node {i} outside 1..={}", self.n)));
        }
        Ok(i - 1)
    }

    /// Contribution of cluster `h` to the amplitude series `a_j(χ)`,
    /// `j = 1..N`, through its assigned route.
    pub fn cluster_amplitudes(&self, h: usize, psi0: &CVec, i: usize, m: u64) -> Result<Vec<SeriesScalar>> {
        let i0 = self.check_node(i)?;
        Ok(match &self.clusters[h].route {
            Route::EigenPair { mu, vec, .. } => self.eigenpair_amplitudes(mu, vec, psi0, i0, m),
            Route::Cluster => self.operator_amplitudes(h, psi0, i0, m),
        })
    }

    /// Eigenpair route: `μ(χ)^{2m}⟨μ(χ)|ψ(0)⟩⟨j,i|μ(χ)⟩`, the triple
    /// convolution over (a₁-series) × overlap × component.
    pub fn eigenpair_amplitudes(
        &self,
        mu: &SeriesScalar,
        vec: &SeriesVector,
        psi0: &CVec,
        i0: usize,
        m: u64,
    ) -> Vec<SeriesScalar> {
        let a1 = a1_series(mu, m);
        let overlap = SeriesScalar::new(vec.coeffs.iter().map(|v| v.dotc(psi0)).collect());
        let head = a1.mul(&overlap);
        (0..self.n)
            .map(|j| {
                let comp = SeriesScalar::new(vec.coeffs.iter().map(|v| v[index(self.n, j, i0)]).collect());
                head.mul(&comp)
            })
            .collect()
    }

    /// Cluster route: components `(j, i)` of `U(χ)^{2m} P̂_h(χ) ψ(0)`.
    pub fn operator_amplitudes(&self, h: usize, psi0: &CVec, i0: usize, m: u64) -> Vec<SeriesScalar> {
        let mut w = self.projections[h].apply(&Series::constant(psi0.clone(), self.order));
        for _ in 0..2 * m {
            w = self.u_series.apply(&w);
        }
        (0..self.n)
            .map(|j| SeriesScalar::new(w.coeffs.iter().map(|v| v[index(self.n, j, i0)]).collect()))
            .collect()
    }

    /// `a_j(χ) = ⟨j,i|U(χ)^{2m}Π(χ)|ψ(0)⟩` for `j = 1..N`.
    pub fn amplitude_series(&self, psi0: &CVec, i: usize, m: u64) -> Result<Vec<SeriesScalar>> {
        self.walk.check_state(psi0)?;
        let mut total = vec![SeriesScalar::constant(c(0.0), self.order); self.n];
        for h in (0..self.clusters.len()).filter(|&h| self.clusters[h].meets_he) {
            for (t, a) in total.iter_mut().zip(self.cluster_amplitudes(h, psi0, i, m)?) {
                *t = t.add(&a);
            }
        }
        Ok(total)
    }

    /// `N_q(χ) = Σ_j a_j(χ)`.
    pub fn nq_series(&self, psi0: &CVec, i: usize, m: u64) -> Result<SeriesScalar> {
        let a = self.amplitude_series(psi0, i, m)?;
        Ok(a.iter().skip(1).fold(a[0].clone(), |acc, s| acc.add(s)))
    }

    /// `I_q(χ)` series for one node and time.
    pub fn iq_series(&self, psi0: &CVec, i: usize, m: u64, variant: Variant) -> Result<RealSeries> {
        Ok(iq_series(&self.amplitude_series(psi0, i, m)?, variant))
    }

    /// Eigenvector series of every `H_e` pair on the eigenpair route.
    pub fn eigenpair_routes(&self) -> impl Iterator<Item = (usize, &SeriesScalar, &SeriesVector)> {
        self.clusters.iter().filter_map(|cl| match &cl.route {
            Route::EigenPair { pair, mu, vec } => Some((*pair, mu, vec)),
            Route::Cluster => None,
        })
    }
}

/// `I^(r) = Σ_{a+b=r} N^(a)·conj(N^(b))` (summed over `j` for the norm variant),
/// complex so the vanishing imaginary part can be checked.
pub fn iq_series_complex(amps: &[SeriesScalar], variant: Variant) -> SeriesScalar {
    let prod = |s: &SeriesScalar| s.mul(&s.conj());
    match variant {
        Variant::Coherent => {
            let nq = amps.iter().skip(1).fold(amps[0].clone(), |acc, s| acc.add(s));
            prod(&nq)
        }
        Variant::Norm => amps.iter().skip(1).fold(prod(&amps[0]), |acc, s| acc.add(&prod(s))),
    }
}

pub fn iq_series(amps: &[SeriesScalar], variant: Variant) -> RealSeries {
    RealSeries::new(iq_series_complex(amps, variant).coeffs.iter().map(|z| z.re).collect())
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Route::EigenPair { .. } => write!(f, "eigenpair"),
            Route::Cluster => write!(f, "cluster"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, Fixture, FOUR_NODE, K3_BREAKING, TWO_CYCLE};
    use crate::series::{binom, binomial_half};
    use crate::szegedy::{build_walk, quantum_pagerank, uniform_state};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn compositions(n: usize, r: usize) -> Vec<Vec<usize>> {
        if r == 0 {
            return if n == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in 1..=n {
            for mut rest in compositions(n - first, r - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }

    fn fact(k: usize) -> f64 {
        (1..=k).map(|x| x as f64).product()
    }

    /// Closed double-composition form of `μ^(n)`, `+` branch.
    fn mu_closed(lam: &[f64], n: usize) -> Complex64 {
        let l = lam[0];
        let half = binomial_half(n);
        let mut im = 0.0;
        for r in 1..=n {
            let mut bracket = 0.0;
            for rp in 1..=r {
                let pre = (-1f64).powi(rp as i32) * half[rp] * (1.0 - l * l).powf(-(2.0 * rp as f64 - 1.0) / 2.0);
                for ps in compositions(r, rp).into_iter().filter(|p| p.iter().all(|&x| x <= 2)) {
                    let sum: usize = ps.iter().sum();
                    let den: f64 = ps.iter().map(|&p| fact(p)).product();
                    bracket += pre * 2f64.powi(rp as i32) * l.powi((2 * rp - sum) as i32) / den;
                }
            }
            let inner: f64 = compositions(n, r).iter().map(|ps| ps.iter().map(|&p| lam[p]).product::<f64>()).sum();
            im += bracket * inner;
        }
        Complex64::new(lam[n], im)
    }

    /// Combinatorial form of the coefficients of `μ(χ)^{2m}`.
    fn a1_closed(mu: &[Complex64], n: usize, m: usize) -> Complex64 {
        let mut s = c(0.0);
        for r in 1..=n.min(2 * m) {
            let inner: Complex64 =
                compositions(n, r).iter().map(|ps| ps.iter().map(|&p| mu[p]).product::<Complex64>()).sum();
            s += inner * binom(2 * m, r) * mu[0].powi(-(r as i32));
        }
        s * mu[0].powi(2 * m as i32)
    }

    #[test]
    fn mu_at_stationary_root() {
        let mu = mu_series(&RealSeries::new(vec![0.0, 1.0]), Branch::Plus).unwrap();
        assert_abs_diff_eq!(mu.coeffs[0].im, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mu.coeffs[1].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mu.coeffs[1].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn mu_chain_rule() {
        let a = 0.3;
        let mu = mu_series(&RealSeries::new(vec![-0.85, a]), Branch::Plus).unwrap();
        let slope = 0.85 / 0.2775f64.sqrt();
        assert_abs_diff_eq!(slope, 1.613_568_592_779_248, epsilon = 1e-12);
        assert_abs_diff_eq!(mu.coeffs[1].re, a, epsilon = 1e-15);
        assert_abs_diff_eq!(mu.coeffs[1].im, a * slope, epsilon = 1e-14);
        let minus = mu_series(&RealSeries::new(vec![-0.85, a]), Branch::Minus).unwrap();
        assert_abs_diff_eq!(minus.coeffs[1].im, -a * slope, epsilon = 1e-14);
    }

    #[test]
    fn mu_rejects_branch_point() {
        assert!(mu_series(&RealSeries::new(vec![1.0, 0.1]), Branch::Plus).is_err());
        assert!(mu_series(&RealSeries::new(vec![0.2, 0.1]), Branch::Fixed).is_err());
    }

    #[test]
    fn zero_perturbation_mu_is_constant() {
        let mu = mu_series(&RealSeries::new(vec![0.4, 0.0, 0.0, 0.0]), Branch::Plus).unwrap();
        assert!(mu.coeffs[1..].iter().all(|z| z.norm() == 0.0));
    }

    proptest! {
        #[test]
        fn mu_matches_closed_form(l0 in -0.95f64..0.95, l1 in -1.0f64..1.0, l2 in -1.0f64..1.0, l3 in -1.0f64..1.0) {
            let lam = vec![l0, l1, l2, l3];
            let mu = mu_series(&RealSeries::new(lam.clone()), Branch::Plus).unwrap();
            let scale = (1.0 - l0 * l0).powf(-2.5);
            for n in 1..=3 {
                prop_assert!((mu.coeffs[n] - mu_closed(&lam, n)).norm() < 1e-10 * scale);
            }
        }

        #[test]
        fn a1_matches_combinatorial_form(theta in 0.0f64..6.28, re in -1.0f64..1.0, im in -1.0f64..1.0, m in 0usize..5) {
            let mu: Vec<Complex64> =
                vec![Complex64::from_polar(1.0, theta), Complex64::new(re, im), Complex64::new(im, re), Complex64::new(re * im, 0.3)];
            let a1 = a1_series(&SeriesScalar::new(mu.clone()), m as u64);
            for n in 1..=3 {
                prop_assert!((a1.coeffs[n] - a1_closed(&mu, n, m)).norm() < 1e-10 * (1.0 + a1.coeffs[n].norm()));
            }
        }
    }

    #[test]
    fn a1_first_order() {
        let mu = vec![Complex64::from_polar(1.0, 0.7), Complex64::new(0.2, -0.1)];
        let a1 = a1_series(&SeriesScalar::new(mu.clone()), 3);
        assert!((a1.coeffs[1] - mu[0].powi(5) * 6.0 * mu[1]).norm() < 1e-14);
        let a0 = a1_series(&SeriesScalar::new(mu), 0);
        assert_eq!(a0.coeffs[1], c(0.0));
    }

    fn expansion(f: &Fixture, k: usize) -> WalkExpansion {
        WalkExpansion::new(&f.series().unwrap(), k, 1e-8).unwrap()
    }

    #[test]
    fn projections_resolve_identity() {
        let ex = expansion(&K3_BREAKING, 3);
        for l in 1..=3 {
            let total = ex.projections.iter().fold(CMat::zeros(9, 9), |acc, p| acc + &p.coeffs[l]);
            assert!(total.norm() < 1e-12);
        }
    }

    #[test]
    fn first_order_projection_for_simple_cluster() {
        let ex = expansion(&FOUR_NODE, 2);
        let u1 = &ex.u_series.coeffs[1];
        for h in (0..ex.clusters.len()).filter(|&h| ex.clusters[h].multiplicity == 1) {
            let p = ex.unitary.basis.projection(h);
            let s = ex.unitary.basis.reduced_resolvent(h);
            let want = -(&p * u1 * &s) - &s * u1 * &p;
            assert!((&ex.projections[h].coeffs[1] - want).norm() < 1e-10);
        }
    }

    #[test]
    fn v_recursion_and_intertwining() {
        let ex = expansion(&FOUR_NODE, 3);
        let q = &ex.q.coeffs;
        let v2 = (&q[0] * &q[0] + &q[1]) / c(2.0);
        assert!((&ex.v.coeffs[1] - &q[0]).norm() < 1e-14);
        assert!((&ex.v.coeffs[2] - v2).norm() < 1e-12);
        for (h, p) in ex.projections.iter().enumerate() {
            let p0 = ex.unitary.basis.projection(h);
            let comm = &ex.v.coeffs[1] * &p0 - &p0 * &ex.v.coeffs[1];
            assert!((&p.coeffs[1] - comm).norm() < 1e-10);
        }
    }

    #[test]
    fn eigenvector_first_order_residual() {
        let ex = expansion(&FOUR_NODE, 2);
        let u0 = &ex.u_series.coeffs[0];
        let u1 = &ex.u_series.coeffs[1];
        let mut seen = 0;
        for (_, mu, vec) in ex.eigenpair_routes() {
            let r = (u0 - CMat::identity(16, 16) * mu.coeffs[0]) * &vec.coeffs[1]
                + (u1 - CMat::identity(16, 16) * mu.coeffs[1]) * &vec.coeffs[0];
            assert!(r.norm() < 1e-8, "{}", r.norm());
            seen += 1;
        }
        assert!(seen >= 4);
    }

    #[test]
    fn routes_agree_on_simple_clusters() {
        for f in [FOUR_NODE, fixtures::DANGLING_CHAIN] {
            let ex = expansion(&f, 3);
            let ops = build_walk(&f.google().unwrap()).unwrap();
            let psi0 = uniform_state(&ops);
            for h in 0..ex.clusters.len() {
                let Route::EigenPair { mu, vec, .. } = &ex.clusters[h].route else { continue };
                for m in [0, 1, 3] {
                    let a = ex.eigenpair_amplitudes(mu, vec, &psi0, 0, m);
                    let b = ex.operator_amplitudes(h, &psi0, 0, m);
                    for (x, y) in a.iter().zip(&b) {
                        for (p, q) in x.coeffs.iter().zip(&y.coeffs) {
                            assert!((p - q).norm() < 1e-9, "{}: {p} vs {q}", f.name);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn iq_series_is_real_and_anchored() {
        for f in fixtures::ALL {
            let ex = expansion(&f, 3);
            let ops = build_walk(&f.google().unwrap()).unwrap();
            let psi0 = uniform_state(&ops);
            for variant in [Variant::Coherent, Variant::Norm] {
                for i in 1..=ex.n {
                    for m in [0, 2, 5] {
                        let amps = ex.amplitude_series(&psi0, i, m).unwrap();
                        let z = iq_series_complex(&amps, variant);
                        assert!(z.coeffs.iter().all(|x| x.im.abs() < 1e-10), "{}", f.name);
                        let base = quantum_pagerank(&ex.walk, &psi0, i, m, variant).unwrap();
                        assert!((z.coeffs[0].re - base).abs() < 1e-10, "{}: {} vs {base}", f.name, z.coeffs[0].re);
                        let nq = ex.nq_series(&psi0, i, m).unwrap();
                        if variant == Variant::Coherent {
                            let want = 2.0 * (nq.coeffs[1] * nq.coeffs[0].conj()).re;
                            assert!((z.coeffs[1].re - want).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zero_perturbation_series_vanish() {
        let g = TWO_CYCLE.google().unwrap();
        let gs = crate::graph::PerturbationSpec::from_json(fixtures::ZERO_PERTURBATION).unwrap().to_series(&g).unwrap();
        let ex = WalkExpansion::new(&gs, 3, 1e-8).unwrap();
        assert!(ex.q.coeffs.iter().all(|m| m.norm() == 0.0));
        assert!(ex.v.coeffs[1..].iter().all(|m| m.norm() == 0.0));
        let psi0 = uniform_state(&build_walk(&g).unwrap());
        let s = ex.iq_series(&psi0, 1, 4, Variant::Coherent).unwrap();
        assert!(s.coeffs[1..].iter().all(|x| x.abs() < 1e-15));
    }
}
