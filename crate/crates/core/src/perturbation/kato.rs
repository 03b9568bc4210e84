//! Residue-calculus expansions for a normal operator `M(χ) = M + Σ χ^n M^(n)`.
//!
//! With `R(ζ) = (M − ζ)^{-1}` and the convention `S^(0) = −P`, `S^(k) = S^k`
//! (`S` the reduced resolvent at the cluster), the contour integrals collapse to
//! sums over words `S^(k_1) M^(ν_1) S^(k_2) ⋯ M^(ν_p) S^(k_{p+1})`:
//!
//! * projection `P^(n)`: `−Σ_p (−1)^p Σ_{Σν=n, Σk=p}`
//! * reduced operator `T̃^(n)` (coefficient of `(M(χ) − λ)P(χ)`): same with `Σk = p − 1`
//! * mean eigenvalue `λ̂^(n) = (1/m) Σ_p ((−1)^p/p) Σ_{Σν=n, Σk=p−1} tr[M^(ν_1)S^(k_1)⋯M^(ν_p)S^(k_p)]`
//!
//! Everything is evaluated in the unperturbed eigenbasis, where `P` and `S` are
//! diagonal, and words are summed by dynamic programming over
//! `(Σν, Σ(k − 1))` instead of enumerating compositions.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::linalg::{c, cluster_complex, CMat, NormalEigen};
use crate::spectral::SpectralData;

/// Unitary eigenbasis of a normal matrix, grouped into clusters.
#[derive(Debug, Clone)]
pub struct Eigenbasis {
    pub vectors: CMat,
    pub centers: Vec<Complex64>,
    pub clusters: Vec<Vec<usize>>,
}

impl Eigenbasis {
    pub fn from_symmetric(sd: &SpectralData) -> Self {
        Eigenbasis {
            vectors: sd.vectors.map(c),
            centers: sd.eigenvalues.iter().map(|&l| c(l)).collect(),
            clusters: sd.clusters.clone(),
        }
    }

    pub fn from_normal(eig: &NormalEigen, tol: f64) -> Self {
        let clusters = cluster_complex(&eig.values, tol);
        let centers = clusters
            .iter()
            .map(|g| g.iter().map(|&k| eig.values[k]).sum::<Complex64>() / g.len() as f64)
            .collect();
        Eigenbasis { vectors: eig.vectors.clone(), centers, clusters }
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn multiplicity(&self, h: usize) -> usize {
        self.clusters[h].len()
    }

    pub fn to_eigen(&self, m: &CMat) -> CMat {
        self.vectors.adjoint() * m * &self.vectors
    }

    pub fn from_eigen(&self, m: &CMat) -> CMat {
        &self.vectors * m * self.vectors.adjoint()
    }

    pub fn isolation(&self, h: usize) -> f64 {
        (0..self.centers.len())
            .filter(|&k| k != h)
            .map(|k| (self.centers[k] - self.centers[h]).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Projection onto cluster `h`, in the original basis.
    pub fn projection(&self, h: usize) -> CMat {
        let d = self.dim();
        let mut p = CMat::zeros(d, d);
        for &k in &self.clusters[h] {
            let v = self.vectors.column(k);
            p += &v * v.adjoint();
        }
        p
    }

    /// Reduced resolvent `Σ_{k≠h} P_k/(μ_k − μ_h)`, in the original basis.
    pub fn reduced_resolvent(&self, h: usize) -> CMat {
        let diag = self.s_diag(h);
        let scaled = CMat::from_fn(self.dim(), self.dim(), |r, k| self.vectors[(r, k)] * diag[k]);
        scaled * self.vectors.adjoint()
    }

    fn s_diag(&self, h: usize) -> Vec<Complex64> {
        let mut s = vec![c(0.0); self.dim()];
        for (k, group) in self.clusters.iter().enumerate() {
            if k != h {
                let w = c(1.0) / (self.centers[k] - self.centers[h]);
                for &col in group {
                    s[col] = w;
                }
            }
        }
        s
    }
}

/// Expansion engine for one cluster `h` of an [`Eigenbasis`].
pub struct ClusterExpansion<'a> {
    basis: &'a Eigenbasis,
    h: usize,
    /// `x[ν]` = `M^(ν)` in the eigenbasis; `x[0]` unused.
    x: Vec<CMat>,
    s: Vec<Complex64>,
    p: Vec<f64>,
    memo_g: HashMap<(usize, i64), CMat>,
    memo_f: HashMap<(usize, i64, usize), CMat>,
}

impl<'a> ClusterExpansion<'a> {
    /// `terms[n-1] = M^(n)` in the original basis.
    pub fn new(basis: &'a Eigenbasis, h: usize, terms: &[CMat]) -> Self {
        let d = basis.dim();
        let mut x = vec![CMat::zeros(d, d)];
        x.extend(terms.iter().map(|t| basis.to_eigen(t)));
        let mut p = vec![0.0; d];
        for &k in &basis.clusters[h] {
            p[k] = 1.0;
        }
        ClusterExpansion { basis, h, x, s: basis.s_diag(h), p, memo_g: HashMap::new(), memo_f: HashMap::new() }
    }

    pub fn order(&self) -> usize {
        self.x.len() - 1
    }

    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn s_pow(&self, k: usize) -> Vec<Complex64> {
        if k == 0 {
            self.p.iter().map(|&x| c(-x)).collect()
        } else {
            self.s.iter().map(|&s| s.powu(k as u32)).collect()
        }
    }

    fn scale_rows(diag: &[Complex64], m: &CMat) -> CMat {
        CMat::from_fn(m.nrows(), m.ncols(), |r, k| diag[r] * m[(r, k)])
    }

    fn scale_cols(m: &CMat, diag: &[Complex64]) -> CMat {
        CMat::from_fn(m.nrows(), m.ncols(), |r, k| m[(r, k)] * diag[k])
    }

    /// Signed sum of block words `(M^(ν)S^(k))…` with `Σν = a`, `Σ(k−1) = e`,
    /// weight `(−1)^p`.
    fn g(&mut self, a: usize, e: i64) -> CMat {
        let d = self.dim();
        if a == 0 {
            return if e == 0 { CMat::identity(d, d) } else { CMat::zeros(d, d) };
        }
        if e < -(a as i64) {
            return CMat::zeros(d, d);
        }
        if let Some(m) = self.memo_g.get(&(a, e)) {
            return m.clone();
        }
        let mut acc = CMat::zeros(d, d);
        for nu in 1..=a.min(self.order()) {
            let b = a - nu;
            let mut h = CMat::zeros(d, d);
            let kmax = e + 1 + b as i64;
            for k in 0..=kmax.max(-1) {
                if k < 0 {
                    break;
                }
                let inner = self.g(b, e - k + 1);
                h += Self::scale_rows(&self.s_pow(k as usize), &inner);
            }
            acc -= &self.x[nu] * h;
        }
        self.memo_g.insert((a, e), acc.clone());
        acc
    }

    /// Unsigned words of exactly `p` blocks, `Σν = a`, `Σ(k−1) = e`.
    fn f(&mut self, a: usize, e: i64, p: usize) -> CMat {
        let d = self.dim();
        if p == 0 {
            return if a == 0 && e == 0 { CMat::identity(d, d) } else { CMat::zeros(d, d) };
        }
        if a < p || e < -(a as i64) {
            return CMat::zeros(d, d);
        }
        if let Some(m) = self.memo_f.get(&(a, e, p)) {
            return m.clone();
        }
        let mut acc = CMat::zeros(d, d);
        for nu in 1..=(a - (p - 1)).min(self.order()) {
            let b = a - nu;
            let kmax = e + 1 + b as i64;
            for k in 0..=kmax.max(-1) {
                if k < 0 {
                    break;
                }
                let inner = self.f(b, e - k + 1, p - 1);
                let xs = Self::scale_cols(&self.x[nu], &self.s_pow(k as usize));
                acc += xs * inner;
            }
        }
        self.memo_f.insert((a, e, p), acc.clone());
        acc
    }

    /// `P^(n)` in the eigenbasis.
    fn projection_eigen(&mut self, n: usize) -> CMat {
        let d = self.dim();
        if n == 0 {
            return CMat::from_diagonal(&nalgebra::DVector::from_iterator(d, self.p.iter().map(|&x| c(x))));
        }
        let mut acc = CMat::zeros(d, d);
        for k1 in 0..=n {
            let inner = self.g(n, -(k1 as i64));
            acc -= Self::scale_rows(&self.s_pow(k1), &inner);
        }
        acc
    }

    /// `T̃^(n)` in the eigenbasis (`T̃^(0) = 0`).
    fn reduced_eigen(&mut self, n: usize) -> CMat {
        let d = self.dim();
        let mut acc = CMat::zeros(d, d);
        if n == 0 {
            return acc;
        }
        for k1 in 0..n {
            let inner = self.g(n, -1 - k1 as i64);
            acc -= Self::scale_rows(&self.s_pow(k1), &inner);
        }
        acc
    }

    /// Projection coefficients `P^(0..=K)` in the original basis.
    pub fn projection_series(&mut self) -> Vec<CMat> {
        (0..=self.order()).map(|n| self.basis.from_eigen(&self.projection_eigen(n))).collect()
    }

    /// Same, left in the eigenbasis.
    pub fn projection_series_eigen(&mut self) -> Vec<CMat> {
        (0..=self.order()).map(|n| self.projection_eigen(n)).collect()
    }

    /// `T̃^(1..=K)` in the original basis; entry `n-1` holds `T̃^(n)`.
    pub fn reduced_series(&mut self) -> Vec<CMat> {
        (1..=self.order()).map(|n| self.basis.from_eigen(&self.reduced_eigen(n))).collect()
    }

    /// Mean-eigenvalue coefficients `λ̂^(0..=K)` from the trace formula over
    /// `p`-block words.
    pub fn eigenvalue_series(&mut self) -> Vec<Complex64> {
        let m = self.basis.multiplicity(self.h) as f64;
        let mut out = vec![self.basis.centers[self.h]];
        for n in 1..=self.order() {
            let mut acc = c(0.0);
            for p in 1..=n {
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                acc += self.f(n, -1, p).trace() * (sign / p as f64);
            }
            out.push(acc / m);
        }
        out
    }

    /// `λ̂^(n) = tr T̃^(n) / m`, an independent route to the same coefficients.
    pub fn eigenvalue_series_by_trace(&mut self) -> Vec<Complex64> {
        let m = self.basis.multiplicity(self.h) as f64;
        let mut out = vec![self.basis.centers[self.h]];
        for n in 1..=self.order() {
            out.push(self.reduced_eigen(n).trace() / m);
        }
        out
    }
}
