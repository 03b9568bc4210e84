//! Szegedy walk `U = S_w(2B − I)` on `C^N ⊗ C^N` and the unperturbed quantum
//! PageRank quantities built from its eigenpairs.
//!
//! Basis ordering: `|j,k⟩ ↦ (j−1)·N + (k−1)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::GoogleMatrix;
use crate::linalg::{c, cluster_complex, normalize_phase, range_basis, CMat, CVec, NormalEigen, RMat};
use crate::spectral::SpectralData;

/// Largest admissible walk dimension `N²`.
pub const DEFAULT_DIM_CAP: usize = 4096;

#[derive(Debug, Clone)]
pub struct SzegedyOperators {
    pub n: usize,
    /// Column `j` is `|ψ_j⟩ = |j⟩ ⊗ Σ_k √g_jk |k⟩`.
    pub psi: RMat,
    pub b: RMat,
    pub swap: RMat,
    pub u: RMat,
}

pub fn index(n: usize, j: usize, k: usize) -> usize {
    j * n + k
}

pub fn swap_matrix(n: usize) -> RMat {
    let mut s = RMat::zeros(n * n, n * n);
    for j in 0..n {
        for k in 0..n {
            s[(index(n, j, k), index(n, k, j))] = 1.0;
        }
    }
    s
}

pub fn psi_matrix(g: &RMat) -> RMat {
    let n = g.nrows();
    let mut a = RMat::zeros(n * n, n);
    for j in 0..n {
        for k in 0..n {
            a[(index(n, j, k), j)] = g[(j, k)].sqrt();
        }
    }
    a
}

pub fn build_walk(g: &GoogleMatrix) -> Result<SzegedyOperators> {
    build_walk_capped(&g.entries, DEFAULT_DIM_CAP)
}

pub fn build_walk_capped(g: &RMat, cap: usize) -> Result<SzegedyOperators> {
    let n = g.nrows();
    if n * n > cap {
        return Err(Error::Scale { dim: n * n, cap });
    }
    let psi = psi_matrix(g);
    let b = &psi * psi.transpose();
    let swap = swap_matrix(n);
    let u = &swap * (&b * 2.0 - RMat::identity(n * n, n * n));
    Ok(SzegedyOperators { n, psi, b, swap, u })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
    /// `|λ| = 1`: the single eigenvector `μ = λ`.
    Fixed,
}

#[derive(Debug, Clone)]
pub struct WalkPair {
    pub mu: Complex64,
    pub vec: CVec,
    pub origin_lambda: f64,
    /// Index of `origin_lambda` in the `SpectralData` it was matched against.
    pub origin: usize,
    pub branch: Branch,
}

/// Eigenpairs of `U` on `H_e` (which coincides with the dynamical subspace
/// `H_d`), with an orthonormal basis of `H_d`.
#[derive(Debug, Clone)]
pub struct WalkSpectrum {
    pub n: usize,
    pub pairs: Vec<WalkPair>,
    pub hd_basis: RMat,
    pub cluster_tol: f64,
}

/// `μ = λ ± i√(1−λ²)`.
pub fn mu_of(lambda: f64, branch: Branch) -> Complex64 {
    let s = (1.0 - lambda * lambda).max(0.0).sqrt();
    match branch {
        Branch::Plus => Complex64::new(lambda, s),
        Branch::Minus => Complex64::new(lambda, -s),
        Branch::Fixed => c(lambda),
    }
}

pub fn he_eigenpairs(ops: &SzegedyOperators, spec: &SpectralData) -> Result<WalkSpectrum> {
    let n = ops.n;
    let tol = spec.cluster_tol;
    let mut gen = RMat::zeros(n * n, 2 * n);
    gen.columns_mut(0, n).copy_from(&ops.psi);
    gen.columns_mut(n, n).copy_from(&(&ops.swap * &ops.psi));
    let q = range_basis(&gen, 1e-9);
    let ud = q.transpose() * &ops.u * &q;
    let eig = NormalEigen::from_real(&ud, tol);
    let qc = q.map(c);
    let mut pairs = Vec::with_capacity(eig.values.len());
    for (k, &mu) in eig.values.iter().enumerate() {
        let origin = nearest(&spec.eigenvalues, mu.re);
        let lambda = spec.eigenvalues[origin];
        let branch = if (1.0 - lambda.abs()) < tol {
            Branch::Fixed
        } else if mu.im > 0.0 {
            Branch::Plus
        } else {
            Branch::Minus
        };
        let expected = mu_of(lambda, branch);
        if (mu - expected).norm() > 1e-8 {
            return Err(Error::Ambiguous(format!(
                "eigenvalue {mu} of U on H_d does not match λ = {lambda} (expected {expected})"
            )));
        }
        let vec = &qc * eig.vectors.column(k);
        pairs.push(WalkPair { mu, vec, origin_lambda: lambda, origin, branch });
    }
    let values: Vec<Complex64> = pairs.iter().map(|p| p.mu).collect();
    for group in cluster_complex(&values, tol) {
        if group.len() == 1 {
            normalize_phase(&mut pairs[group[0]].vec);
        }
        let origins: Vec<usize> = group.iter().map(|&g| pairs[g].origin).collect();
        if origins.iter().any(|&o| o != origins[0]) {
            return Err(Error::Ambiguous("two distinct λ give μ values closer than cluster_tol".into()));
        }
    }
    Ok(WalkSpectrum { n, pairs, hd_basis: q, cluster_tol: tol })
}

fn nearest(values: &[f64], x: f64) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if (v - x).abs() < (values[best] - x).abs() {
            best = k;
        }
    }
    best
}

/// `ψ(0) = N^{-1/2} Σ_j |ψ_j⟩`.
pub fn uniform_state(ops: &SzegedyOperators) -> CVec {
    let n = ops.n;
    let v = ops.psi.column_sum() / (n as f64).sqrt();
    v.map(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// `|Σ_j ⟨j,i|Π U^{2m}ψ(0)⟩|²`, the sum inside the modulus.
    #[default]
    Coherent,
    /// `Σ_j |⟨j,i|Π U^{2m}ψ(0)⟩|²`, the norm over the first register.
    Norm,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherent" => Ok(Variant::Coherent),
            "norm" => Ok(Variant::Norm),
            _ => Err(Error::Invalid(format!("unknown variant '{s}' (expected coherent|norm)"))),
        }
    }
}

impl WalkSpectrum {
    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    /// `‖ψ − Π_{H_d}ψ‖`.
    pub fn hd_residual(&self, psi0: &CVec) -> f64 {
        let qc = self.hd_basis.map(c);
        let proj = &qc * (qc.adjoint() * psi0);
        (psi0 - proj).norm()
    }

    pub fn check_state(&self, psi0: &CVec) -> Result<()> {
        if psi0.len() != self.dim() {
            return Err(Error::Invalid(format!("state has length {}, expected {}", psi0.len(), self.dim())));
        }
        if (psi0.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::Invalid(format!("state has norm {}, expected 1", psi0.norm())));
        }
        let residual = self.hd_residual(psi0);
        if residual > 1e-8 {
            return Err(Error::NotInDynamical { residual });
        }
        Ok(())
    }

    /// `⟨μ_p|ψ(0)⟩` for every pair.
    pub fn overlaps(&self, psi0: &CVec) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.vec.dotc(psi0)).collect()
    }

    /// `Σ_p |μ_p⟩⟨μ_p|`.
    pub fn he_projector(&self) -> CMat {
        let d = self.dim();
        let mut p = CMat::zeros(d, d);
        for pair in &self.pairs {
            p += &pair.vec * pair.vec.adjoint();
        }
        p
    }

    /// Amplitudes `a_j = Σ_p μ_p^{2m}⟨j,i|μ_p⟩⟨μ_p|ψ(0)⟩`, `i` 0-based.
    pub fn amplitudes(&self, overlaps: &[Complex64], i: usize, m: u64) -> Vec<Complex64> {
        let n = self.n;
        let mut a = vec![c(0.0); n];
        for (pair, &ov) in self.pairs.iter().zip(overlaps) {
            let w = pair.mu.powu((2 * m) as u32) * ov;
            for (j, aj) in a.iter_mut().enumerate() {
                *aj += pair.vec[index(n, j, i)] * w;
            }
        }
        a
    }

    /// μ groups for time averages: pairs with equal `μ²` (within tolerance).
    pub fn square_groups(&self) -> Vec<Vec<usize>> {
        let sq: Vec<Complex64> = self.pairs.iter().map(|p| p.mu * p.mu).collect();
        cluster_complex(&sq, self.cluster_tol)
    }
}

pub fn fold(a: &[Complex64], variant: Variant) -> f64 {
    match variant {
        Variant::Coherent => a.iter().sum::<Complex64>().norm_sqr(),
        Variant::Norm => a.iter().map(|z| z.norm_sqr()).sum(),
    }
}

fn check_node(ws: &WalkSpectrum, i: usize) -> Result<usize> {
    if i == 0 || i > ws.n {
        return Err(Error::Invalid(format!("node {i} outside 1..={}", ws.n)));
    }
    Ok(i - 1)
}

/// Quantum PageRank `I_q(i, m | ψ(0))` for 1-based node `i`.
pub fn quantum_pagerank(ws: &WalkSpectrum, psi0: &CVec, i: usize, m: u64, variant: Variant) -> Result<f64> {
    ws.check_state(psi0)?;
    quantum_pagerank_unchecked(ws, psi0, i, m, variant)
}

/// As [`quantum_pagerank`] without the `ψ(0) ∈ H_d` precondition.
pub fn quantum_pagerank_unchecked(
    ws: &WalkSpectrum,
    psi0: &CVec,
    i: usize,
    m: u64,
    variant: Variant,
) -> Result<f64> {
    let i0 = check_node(ws, i)?;
    let ov = ws.overlaps(psi0);
    Ok(fold(&ws.amplitudes(&ov, i0, m), variant))
}

/// `Ī_q(t, i) = (1/t) Σ_{m<t} I_q(i, m)`.
pub fn average_pagerank(ws: &WalkSpectrum, psi0: &CVec, i: usize, t: u64, variant: Variant) -> Result<f64> {
    ws.check_state(psi0)?;
    if t == 0 {
        return Err(Error::Invalid("t must be at least 1".into()));
    }
    let i0 = check_node(ws, i)?;
    let ov = ws.overlaps(psi0);
    // step the phases instead of recomputing powers
    let n = ws.n;
    let mut phase: Vec<Complex64> = ov.clone();
    let step: Vec<Complex64> = ws.pairs.iter().map(|p| p.mu * p.mu).collect();
    let mut total = 0.0;
    for _ in 0..t {
        let mut a = vec![c(0.0); n];
        for (p, pair) in ws.pairs.iter().enumerate() {
            for (j, aj) in a.iter_mut().enumerate() {
                *aj += pair.vec[index(n, j, i0)] * phase[p];
            }
        }
        total += fold(&a, variant);
        for (ph, s) in phase.iter_mut().zip(&step) {
            *ph *= s;
        }
    }
    Ok(total / t as f64)
}

/// `lim_{t→∞} Ī_q(t, i)`: only pairs with `μ_p² = μ_q²` survive the time
/// average, so each such group contributes a coherent sum.
pub fn limit_pagerank(ws: &WalkSpectrum, psi0: &CVec, i: usize, variant: Variant) -> Result<f64> {
    let i0 = check_node(ws, i)?;
    let ov = ws.overlaps(psi0);
    let n = ws.n;
    let mut total = 0.0;
    for group in ws.square_groups() {
        let a: Vec<Complex64> = (0..n)
            .map(|j| group.iter().map(|&p| ov[p] * ws.pairs[p].vec[index(n, j, i0)]).sum())
            .collect();
        total += fold(&a, variant);
    }
    Ok(total)
}

/// `Σ_{μ_p≠μ_q} 2|⟨μ_p|ψ(0)⟩|² / (t·|μ_p − μ_q|)` over ordered pairs.
pub fn mixing_bound(ws: &WalkSpectrum, psi0: &CVec, t: u64) -> Result<f64> {
    if t == 0 {
        return Err(Error::Invalid("t must be at least 1".into()));
    }
    let ov = ws.overlaps(psi0);
    let mut total = 0.0;
    for (p, a) in ws.pairs.iter().enumerate() {
        for b in &ws.pairs {
            let gap = (a.mu - b.mu).norm();
            if gap >= ws.cluster_tol {
                total += 2.0 * ov[p].norm_sqr() / gap;
            }
        }
    }
    Ok(total / t as f64)
}

/// Brute-force `I_q` from `Π_{H_e} U^{2m} ψ(0)` with dense powers of `U`.
pub fn dense_pagerank(ops: &SzegedyOperators, ws: &WalkSpectrum, psi0: &CVec, i: usize, m: u64, variant: Variant) -> f64 {
    let n = ops.n;
    let u = ops.u.map(c);
    let mut state = psi0.clone();
    for _ in 0..2 * m {
        state = &u * state;
    }
    let projected = ws.he_projector() * state;
    let a: Vec<Complex64> = (0..n).map(|j| projected[index(n, j, i - 1)]).collect();
    fold(&a, variant)
}
