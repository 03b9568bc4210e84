//! Convergence radii and the coefficient-bound chain.
//!
//! Every bound has the form `|c_n| ≤ A·B^{n−1}` for `n ≥ 1` ([`Envelope`]). The
//! chain follows the lemma structure: entry bounds `(A0, B0)` → square roots
//! `(A1, B1)` → `U` `(A2, B2)` and `T` `(A3, B3)` → eigenprojections of `U`
//! `(A6, B6)` → `Q` `(A7, B7)` → `V` and `|μ(χ)⟩` `(A8, B8)` → `N_q` `(A11, B11)`
//! → `I_q`. Polynomial factors such as `(n − 1)` are absorbed into `B` with a
//! fixed growth slack `1 + η`, and eigenvalue bounds come from Cauchy
//! estimates on the disc where each eigenvalue group stays isolated.

use crate::error::Result;
use crate::graph::MatrixSeries;
use crate::linalg::{spectral_norm, spectral_norm_real, RMat};
use crate::series::RealSeries;

use super::tree::NodeKind;
use super::walk::{Route, WalkExpansion};

/// Free parameter of the square-root estimate.
pub const DELTA: f64 = 0.5;
/// Growth slack used to absorb polynomial factors into the geometric rate.
pub const ETA: f64 = 0.25;
/// Relative inflation keeping bounds that are tight by construction above
/// the rounded values they bound.
pub const ROUNDING_GUARD: f64 = 1.0 + 1e-12;
/// Fraction of a radius at which Cauchy estimates are taken.
pub const CAUCHY_FRACTION: f64 = 0.5;

/// `|c_n| ≤ a·b^{n−1}` for every `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub a: f64,
    pub b: f64,
}

impl Envelope {
    pub const ZERO: Envelope = Envelope { a: 0.0, b: 0.0 };

    pub fn at(&self, n: usize) -> f64 {
        if self.a == 0.0 {
            return 0.0;
        }
        self.a * self.b.powi(n as i32 - 1)
    }

    /// `Σ_{n>K} a·b^{n−1}|χ|^n = a·b^K|χ|^{K+1}/(1 − b|χ|)`; `None` when `b|χ| ≥ 1`.
    pub fn tail(&self, k: usize, chi: f64) -> Option<f64> {
        if self.a == 0.0 {
            return Some(0.0);
        }
        let x = self.b * chi.abs();
        (x < 1.0).then(|| self.a * self.b.powi(k as i32) * chi.abs().powi(k as i32 + 1) / (1.0 - x))
    }

    /// Aliasing error of `M`-point Cauchy extraction of coefficient `n` at radius `rho`.
    pub fn aliasing(&self, n: usize, rho: f64, samples: usize) -> Option<f64> {
        if self.a == 0.0 {
            return Some(0.0);
        }
        let x = (self.b * rho).powi(samples as i32);
        (self.b * rho < 1.0).then(|| self.a * self.b.powi(n as i32 - 1) * x / (1.0 - x))
    }

    /// Cauchy estimate from `sup_{|χ|=ρ} |f(χ) − f(0)| ≤ m`.
    pub fn cauchy(m: f64, rho: f64) -> Envelope {
        Envelope { a: m / rho, b: 1.0 / rho }
    }
}

/// `max_{n≥0} f(n)` for a unimodal sequence, scanning up to its peak.
fn unimodal_max(f: impl Fn(usize) -> f64) -> f64 {
    let mut best = f(0);
    for n in 1..1_000_000 {
        let v = f(n);
        if v < best {
            break;
        }
        best = v;
    }
    best
}

/// `κ = max_{n≥0} p(n)/(1+η)^n`.
fn slack(p: impl Fn(f64) -> f64) -> f64 {
    unimodal_max(|n| p(n as f64) / (1.0 + ETA).powi(n as i32))
}

/// Envelope for `2α β^{n−1} + (n−1)α²β^{n−2}`, the coefficients of a product of
/// two series each `1 + O(χ)` with bound `(α, β)`.
fn product_envelope(alpha: f64, beta: f64) -> Envelope {
    if alpha == 0.0 {
        return Envelope::ZERO;
    }
    let kappa = slack(|x| x);
    Envelope { a: 2.0 * alpha + kappa * alpha * alpha / beta, b: beta * (1.0 + ETA) }
}

/// Per-entry convergence radii of the square-root expansion.
#[derive(Debug, Clone)]
pub struct EntryRadius {
    pub i: usize,
    pub j: usize,
    /// Relative criterion `Σ_l |g^(l)_ij| r^l = g_ij` (binding).
    pub relative: f64,
    /// Absolute criterion `Σ_l |g^(l)_ij| r^l = 1` (reported).
    pub absolute: f64,
}

/// Radius and eigenvalue constant of one tree node's eigenvalue group.
#[derive(Debug, Clone)]
pub struct LevelBound {
    pub node: usize,
    /// Bound on the level operator's coefficients.
    pub operator: Envelope,
    pub isolation: f64,
    /// `(2A/d + B)^{-1}`.
    pub radius: f64,
}

/// Eigenvalue series bound `|λ^(n)| ≤ ϱ r^{−n}` for one leaf.
#[derive(Debug, Clone)]
pub struct LeafBound {
    pub leaf: usize,
    pub root: usize,
    pub varrho: f64,
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub struct RadiusEstimate {
    pub entries: Vec<EntryRadius>,
    /// `r_h` for each distinct eigenvalue of `T`.
    pub r_h: Vec<f64>,
    pub levels: Vec<LevelBound>,
    pub leaves: Vec<LeafBound>,
    pub r1: f64,
    pub r2: f64,
    pub r0: f64,
    /// Uniform `ϱ_1` with `|λ^(n)| ≤ ϱ_1 r_1^{−n}` for every leaf.
    pub varrho1: f64,
}

impl RadiusEstimate {
    fn infinite(n_h: usize) -> Self {
        RadiusEstimate {
            entries: Vec::new(),
            r_h: vec![f64::INFINITY; n_h],
            levels: Vec::new(),
            leaves: Vec::new(),
            r1: f64::INFINITY,
            r2: f64::INFINITY,
            r0: f64::INFINITY,
            varrho1: 0.0,
        }
    }

    pub fn leaf_tail(&self, leaf: usize, k: usize, chi: f64) -> Option<f64> {
        let lb = &self.leaves[leaf];
        let x = chi.abs() / lb.radius;
        (x < 1.0).then(|| lb.varrho * x.powi(k as i32 + 1) / (1.0 - x))
    }
}

/// Full coefficient-bound chain for one expansion.
#[derive(Debug, Clone)]
pub struct BoundLedger {
    pub a0: f64,
    pub b0: f64,
    pub eps0: f64,
    /// `‖ψ_j^(l)‖`.
    pub psi: Envelope,
    /// `‖U^(n)‖`.
    pub u: Envelope,
    /// `‖T^(n)‖`.
    pub t: Envelope,
    /// `‖P_h^(n)‖` for each eigenvalue of `T`.
    pub t_projection: Vec<Envelope>,
    /// `‖P̂_h^(n)‖` for each eigenvalue cluster of `U`.
    pub u_projection: Vec<Envelope>,
    /// `‖Q^(r)‖ ≤ a·b^r` for `r ≥ 0` (`Q^(r)` is the `χ^r` coefficient).
    pub q: Envelope,
    /// `‖V^(n)‖` and `‖|μ^(n)⟩‖`.
    pub v: Envelope,
    /// `|μ^(n)|` for eigenpair-route clusters, indexed like `WalkExpansion::clusters`.
    pub mu: Vec<Option<Envelope>>,
    pub radius: RadiusEstimate,
    n: usize,
    he_clusters: Vec<usize>,
}

fn entry_radius(terms: &[f64], target: f64) -> f64 {
    let f = |r: f64| terms.iter().enumerate().map(|(l, g)| g.abs() * r.powi(l as i32 + 1)).sum::<f64>();
    if terms.iter().all(|&g| g == 0.0) {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Builds the whole chain; radii first, since eigenvalue and `μ` bounds need them.
pub fn error_bounds(gs: &MatrixSeries, ex: &WalkExpansion) -> Result<BoundLedger> {
    let n = gs.n();
    let n_h = ex.spectral.distinct_count();
    let he_clusters: Vec<usize> = (0..ex.clusters.len()).filter(|&h| ex.clusters[h].meets_he).collect();
    if gs.is_zero() {
        return Ok(BoundLedger {
            a0: 0.0,
            b0: gs.bound_b0,
            eps0: 0.0,
            psi: Envelope::ZERO,
            u: Envelope::ZERO,
            t: Envelope::ZERO,
            t_projection: vec![Envelope::ZERO; n_h],
            u_projection: vec![Envelope::ZERO; ex.clusters.len()],
            q: Envelope::ZERO,
            v: Envelope::ZERO,
            mu: vec![None; ex.clusters.len()],
            radius: RadiusEstimate::infinite(n_h),
            n,
            he_clusters,
        });
    }
    let (a0, b0) = (gs.bound_a0, gs.bound_b0);
    let perturbed = |j: usize, k: usize| gs.terms.iter().any(|t| t[(j, k)] != 0.0);

    // Square roots: |a_jk^(n)| ≤ √g (1 − √(1−δ)) B0^n ε0 (1+ε0)^{n−1}.
    let mut eps0: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            if perturbed(j, k) {
                eps0 = eps0.max(a0 / (DELTA * b0 * gs.base[(j, k)]));
            }
        }
    }
    let alpha = (1.0 - (1.0 - DELTA).sqrt()) * eps0 * b0;
    let beta = b0 * (1.0 + eps0);
    let col_mass = (0..n)
        .map(|j| (0..n).filter(|&k| perturbed(j, k)).map(|k| gs.base[(j, k)]).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let psi = Envelope { a: alpha * col_mass, b: beta };

    // U = S(2AAᵀ − I); the columns of A have disjoint support.
    let bb = product_envelope(psi.a, psi.b);
    let u = Envelope { a: 2.0 * bb.a, b: bb.b };

    // T: |t_ij^(n)| ≤ t_ij·c_n entrywise, dominated by the nonnegative matrix of perturbed t_ij.
    let tpert = RMat::from_fn(n, n, |i, j| {
        if perturbed(i, j) || perturbed(j, i) {
            (gs.base[(i, j)] * gs.base[(j, i)]).sqrt()
        } else {
            0.0
        }
    });
    let tc = product_envelope(alpha, beta);
    let t = Envelope { a: tc.a * spectral_norm_real(&tpert), b: tc.b };

    // Projections of T: contour of radius d/2, ‖R‖ = 2/d on it.
    let proj = |env: Envelope, d: f64| {
        let a = 2.0 * env.a / d;
        Envelope { a, b: a + env.b }
    };
    let t_projection: Vec<Envelope> = (0..n_h).map(|h| proj(t, ex.spectral.isolation[h])).collect();
    let r_h: Vec<f64> = t_projection.iter().map(|e| 1.0 / e.b).collect();

    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if perturbed(i, j) {
                let terms: Vec<f64> = gs.terms.iter().map(|m| m[(i, j)]).collect();
                entries.push(EntryRadius {
                    i: i + 1,
                    j: j + 1,
                    relative: entry_radius(&terms, gs.base[(i, j)]),
                    absolute: entry_radius(&terms, 1.0),
                });
            }
        }
    }

    let (levels, leaves) = tree_bounds(ex, t);
    let r_entries = entries.iter().map(|e| e.relative).fold(f64::INFINITY, f64::min);
    let r1 = leaves.iter().map(|l| l.radius).fold(r_entries, f64::min);
    let varrho1 = leaves.iter().map(|l| l.varrho).fold(0.0, f64::max);
    let mut radius = RadiusEstimate { entries, r_h, levels, leaves, r1, r2: f64::INFINITY, r0: r1, varrho1 };
    radius.r2 = unit_crossing(ex, &radius);
    radius.r0 = radius.r1.min(radius.r2);

    // Projections of U.
    let u_projection: Vec<Envelope> =
        (0..ex.clusters.len()).map(|h| proj(u, ex.unitary.basis.isolation(h))).collect();

    // Q^(r) = −Σ_h Σ_a (r−a+1) P̂^(a) P̂^(r+1−a).
    let k1 = slack(|x| x + 1.0);
    let k2 = slack(|x| x * (x + 1.0) / 2.0);
    let bmax = u_projection.iter().map(|e| e.b).fold(0.0, f64::max);
    let q = Envelope {
        a: u_projection.iter().map(|e| k1 * e.a + k2 * e.a * e.a / e.b).sum(),
        b: bmax * (1.0 + ETA),
    };

    // V' = QV: majorant (1 − b χ)^{−a/b}.
    let v = v_envelope(q);

    let mu = ex
        .clusters
        .iter()
        .map(|cl| match &cl.route {
            Route::EigenPair { pair, .. } => {
                let p = &ex.walk.pairs[*pair];
                let leaf = radius.leaves.iter().find(|l| l.root == p.origin)?;
                mu_envelope(p.origin_lambda, leaf)
            }
            Route::Cluster => None,
        })
        .collect();

    Ok(BoundLedger { a0, b0, eps0, psi, u, t, t_projection, u_projection, q, v, mu, radius, n, he_clusters })
}

fn v_envelope(q: Envelope) -> Envelope {
    if q.a == 0.0 {
        return Envelope::ZERO;
    }
    let a = q.a / q.b;
    let b = q.b * (1.0 + ETA);
    // w_n = v_n / b^{n−1}, v_n = q.b^n Π_{k<n} (a+k)/(k+1).
    let peak = unimodal_max(|n| {
        let n = n + 1;
        let mut w = b;
        for k in 0..n {
            w *= (a + k as f64) / ((k + 1) as f64 * (1.0 + ETA));
        }
        w
    });
    Envelope { a: peak, b }
}

/// `|μ(χ) − μ| ≤ L + L(2|λ|+L)/√(1−λ²)` on `|χ| = ρ`, where `L` bounds
/// `|λ(χ) − λ|` there; `ρ` is halved until the square root stays analytic.
fn mu_envelope(lambda: f64, leaf: &LeafBound) -> Option<Envelope> {
    let w0 = 1.0 - lambda * lambda;
    let mut rho = CAUCHY_FRACTION * leaf.radius;
    for _ in 0..60 {
        let x = rho / leaf.radius;
        let l = leaf.varrho * x / (1.0 - x);
        let dw = l * (2.0 * lambda.abs() + l);
        if dw < CAUCHY_FRACTION * w0 {
            return Some(Envelope::cauchy(l + dw / w0.sqrt(), rho));
        }
        rho *= 0.5;
    }
    None
}

/// Radii and eigenvalue constants along the reduction tree. With level
/// envelope `(A, B)` and isolation `d`, the node's group stays inside the
/// circle of radius `d/2` for `|χ| < r = (2A/d + B)^{-1}`, so its mean
/// eigenvalue satisfies `|ν^(n)| ≤ (d/2) r^{−n}`. Expanding the resolvent on
/// that circle bounds the coefficients of `(L(χ) − ν)P(χ)` by
/// `A(B + a)^{n−1}`, `a = 2A/d`, so the child operator `L₁^(j)` is bounded by
/// `A(B + a)^j`, plus `c·a(B + a)^{j−1}` from a complement shift `c(I − P(χ))`.
fn tree_bounds(ex: &WalkExpansion, t: Envelope) -> (Vec<LevelBound>, Vec<LeafBound>) {
    let tree = &ex.tree;
    let mut levels = Vec::new();
    for &root in &tree.roots {
        let mut stack = vec![(root, t)];
        while let Some((id, op)) = stack.pop() {
            let node = &tree.nodes[id];
            let d = node.isolation;
            let a = 2.0 * op.a / d;
            let radius = 1.0 / (a + op.b);
            levels.push(LevelBound { node: id, operator: op, isolation: d, radius });
            if node.kind != NodeKind::Internal {
                continue;
            }
            let shift = node.children.first().map(|&c| tree.nodes[c].shift).unwrap_or(0.0);
            let child = Envelope { a: op.a * (op.b + a) + shift * a, b: op.b + a };
            for &c in &node.children {
                stack.push((c, child));
            }
        }
    }
    levels.sort_by_key(|l| l.node);
    let level_of = |id: usize| levels.iter().find(|l| l.node == id).expect("every node has a level bound");
    let leaves = tree
        .leaves
        .iter()
        .enumerate()
        .map(|(k, leaf)| {
            let lb = level_of(leaf.node);
            let r = lb.radius;
            let depth = tree.nodes[leaf.node].level;
            // λ^(n) is the level-n node value for n ≤ depth, then the leaf group's coefficients.
            let mut varrho = 0.5 * lb.isolation * r.powi(depth as i32);
            let mut cur = leaf.node;
            while let Some(p) = tree.nodes[cur].parent {
                let lvl = tree.nodes[cur].level;
                varrho = varrho.max(tree.nodes[cur].value.abs() * r.powi(lvl as i32));
                cur = p;
            }
            LeafBound { leaf: k, root: leaf.root, varrho: varrho * ROUNDING_GUARD, radius: r }
        })
        .collect();
    (levels, leaves)
}

/// Smallest `χ > 0` below `r_1` where some leaf with `|λ_h| < 1` could reach
/// modulus 1: `|λ_trunc(χ)| + tail(χ) ≥ 1`. `+∞` if none does.
fn unit_crossing(ex: &WalkExpansion, radius: &RadiusEstimate) -> f64 {
    let k = ex.order;
    let tracked: Vec<(usize, &RealSeries)> = ex
        .tree
        .leaves
        .iter()
        .enumerate()
        .filter(|(_, l)| ex.spectral.eigenvalues[l.root].abs() < 1.0 - 1e-12)
        .map(|(i, l)| (i, &l.series))
        .collect();
    let hit = |chi: f64| {
        tracked.iter().any(|(i, s)| match radius.leaf_tail(*i, k, chi) {
            Some(tail) => s.evaluate(chi).abs() + tail >= 1.0 || s.evaluate(-chi).abs() + tail >= 1.0,
            None => true,
        })
    };
    if tracked.is_empty() || !radius.r1.is_finite() {
        return f64::INFINITY;
    }
    let steps = 2000;
    let mut prev = 0.0;
    for s in 1..=steps {
        let chi = radius.r1 * s as f64 / steps as f64;
        if chi >= radius.r1 {
            break;
        }
        if hit(chi) {
            let (mut lo, mut hi) = (prev, chi);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if hit(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return lo;
        }
        prev = chi;
    }
    f64::INFINITY
}

impl BoundLedger {
    /// `|N_q^(n)| ≤ A11·B11^{n−1}` via the majorant
    /// `F(χ) = √N (1 + u(χ))^{2m} (1 + Σ_{h∈E} p_h(χ))` of `⟨φ_i|U(χ)^{2m}Π(χ)ψ(0)⟩`,
    /// `‖φ_i‖ = √N`, taken at `ρ = 1/((1+η)·max B)`.
    pub fn nq_envelope(&self, m: u64) -> Envelope {
        match self.majorant(m) {
            Some((f0, f, rho)) => Envelope::cauchy(f - f0, rho),
            None => Envelope::ZERO,
        }
    }

    /// `|I_q^(n)|` from the square of the `N_q` majorant (both variants).
    pub fn iq_envelope(&self, m: u64) -> Envelope {
        match self.majorant(m) {
            Some((f0, f, rho)) => Envelope::cauchy(f * f - f0 * f0, rho),
            None => Envelope::ZERO,
        }
    }

    fn majorant(&self, m: u64) -> Option<(f64, f64, f64)> {
        if self.u.a == 0.0 {
            return None;
        }
        let bmax = self.he_clusters.iter().map(|&h| self.u_projection[h].b).fold(self.u.b, f64::max);
        let rho = 1.0 / ((1.0 + ETA) * bmax);
        let g = |e: &Envelope| e.a * rho / (1.0 - e.b * rho);
        let p: f64 = self.he_clusters.iter().map(|&h| g(&self.u_projection[h])).sum();
        let f0 = (self.n as f64).sqrt();
        Some((f0, f0 * (1.0 + g(&self.u)).powi(2 * m as i32) * (1.0 + p), rho))
    }

    /// `|λ^(n)|` bound for leaf `k` of the tree.
    pub fn lambda_bound(&self, leaf: usize, n: usize) -> f64 {
        match self.radius.leaves.get(leaf) {
            Some(lb) => lb.varrho * lb.radius.powi(-(n as i32)),
            None => 0.0,
        }
    }
}

/// Spectral norms of every coefficient `1..` of a complex matrix series.
pub fn coefficient_norms(coeffs: &[crate::linalg::CMat]) -> Vec<f64> {
    coeffs.iter().skip(1).map(spectral_norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, TWO_CYCLE};
    use crate::graph::PerturbationSpec;

    #[test]
    fn geometric_tail() {
        let e = Envelope { a: 2.0, b: 3.0 };
        let direct: f64 = (4..200).map(|n| e.at(n) * 0.1f64.powi(n as i32)).sum();
        assert!((e.tail(3, 0.1).unwrap() - direct).abs() < 1e-15);
        assert!(e.tail(3, 0.4).is_none());
        assert_eq!(Envelope::ZERO.tail(3, 10.0), Some(0.0));
    }

    #[test]
    fn slack_constants() {
        // max_x x/(1+η)^x = 1/(e ln(1+η)) over the reals; integer max is below.
        let k = slack(|x| x);
        assert!(k <= 1.0 / (std::f64::consts::E * (1.0 + ETA).ln()) + 1e-12);
        assert!(k >= 4.0 / 1.25f64.powi(4));
    }

    #[test]
    fn single_order_entry_radius() {
        let r = entry_radius(&[-0.1], 0.925);
        assert!((r - 9.25).abs() < 1e-12);
        assert!((entry_radius(&[-0.1], 1.0) - 10.0).abs() < 1e-12);
        assert!((entry_radius(&[0.1, 0.01], 0.1) - (-0.1 + (0.01f64 + 0.004).sqrt()) / 0.02).abs() < 1e-12);
    }

    #[test]
    fn zero_perturbation_radii_are_infinite() {
        let g = TWO_CYCLE.google().unwrap();
        let gs = PerturbationSpec::from_json(fixtures::ZERO_PERTURBATION).unwrap().to_series(&g).unwrap();
        let ex = WalkExpansion::new(&gs, 3, 1e-8).unwrap();
        let led = error_bounds(&gs, &ex).unwrap();
        assert!(led.radius.r0.is_infinite() && led.radius.r1.is_infinite() && led.radius.r2.is_infinite());
        assert!(led.radius.r_h.iter().all(|r| r.is_infinite()));
        assert_eq!(led.iq_envelope(3), Envelope::ZERO);
    }

    #[test]
    fn two_cycle_entry_radii() {
        let gs = TWO_CYCLE.series().unwrap();
        let ex = WalkExpansion::new(&gs, 3, 1e-8).unwrap();
        let led = error_bounds(&gs, &ex).unwrap();
        let e12 = led.radius.entries.iter().find(|e| (e.i, e.j) == (1, 2)).unwrap();
        assert!((e12.relative - 9.25).abs() < 1e-12);
        let e11 = led.radius.entries.iter().find(|e| (e.i, e.j) == (1, 1)).unwrap();
        assert!((e11.relative - 0.75).abs() < 1e-12);
        assert!(led.radius.r0 <= led.radius.r1);
        assert!(led.radius.r0 > 0.0);
    }
}
