//! Spectral data of the symmetric core `T`, `t_ij = √(g_ij g_ji)`.

use num_complex::Complex64;

use crate::graph::GoogleMatrix;
use crate::linalg::{c, cluster_sorted, sym_eigen, CMat, RMat};

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SymmetricCore {
    pub n: usize,
    pub entries: RMat,
}

pub fn build_t(g: &GoogleMatrix) -> SymmetricCore {
    SymmetricCore { n: g.n, entries: core_of(&g.entries) }
}

pub(crate) fn core_of(g: &RMat) -> RMat {
    let n = g.nrows();
    RMat::from_fn(n, n, |i, j| (g[(i, j)] * g[(j, i)]).sqrt())
}

/// Distinct eigenvalues of `T` with projections and reduced resolvents.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Distinct eigenvalues, descending (cluster means).
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub projections: Vec<RMat>,
    pub reduced_resolvents: Vec<RMat>,
    pub isolation: Vec<f64>,
    pub cluster_tol: f64,
    /// Orthonormal eigenvectors, columns grouped by cluster.
    pub vectors: RMat,
    /// Column indices of `vectors` for each distinct eigenvalue.
    pub clusters: Vec<Vec<usize>>,
    /// Raw eigenvalues in column order.
    pub raw: Vec<f64>,
}

impl SpectralData {
    pub fn distinct_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn has_negative(&self) -> bool {
        self.eigenvalues.iter().any(|&l| l < -self.cluster_tol)
    }

    /// Unit eigenvector of a simple eigenvalue, sign fixed so the
    /// largest-magnitude entry is positive.
    pub fn simple_vector(&self, h: usize) -> Option<nalgebra::DVector<f64>> {
        if self.multiplicities[h] != 1 {
            return None;
        }
        Some(self.vectors.column(self.clusters[h][0]).into_owned())
    }

    /// Cluster index holding eigenvalue `lambda`, if any lies within `tol`.
    pub fn find(&self, lambda: f64, tol: f64) -> Option<usize> {
        self.eigenvalues.iter().position(|&l| (l - lambda).abs() < tol)
    }
}

pub fn eigendecompose(t: &SymmetricCore, cluster_tol: f64) -> SpectralData {
    eigendecompose_matrix(&t.entries, cluster_tol)
}

pub fn eigendecompose_matrix(t: &RMat, cluster_tol: f64) -> SpectralData {
    assert!(cluster_tol > 0.0, "cluster_tol must be positive");
    let n = t.nrows();
    let (raw, mut vectors) = sym_eigen(t);
    let clusters = cluster_sorted(&raw, cluster_tol);
    for g in &clusters {
        if g.len() == 1 {
            let mut col = vectors.column_mut(g[0]);
            let imax = col.iamax();
            if col[imax] < 0.0 {
                col.neg_mut();
            }
        }
    }
    let eigenvalues: Vec<f64> =
        clusters.iter().map(|g| g.iter().map(|&k| raw[k]).sum::<f64>() / g.len() as f64).collect();
    let projections: Vec<RMat> = clusters
        .iter()
        .map(|g| {
            let q = vectors.columns(g[0], g.len());
            &q * q.transpose()
        })
        .collect();
    let s = eigenvalues.len();
    let reduced_resolvents = (0..s)
        .map(|h| {
            let mut acc = RMat::zeros(n, n);
            for k in (0..s).filter(|&k| k != h) {
                acc += &projections[k] / (eigenvalues[k] - eigenvalues[h]);
            }
            acc
        })
        .collect();
    let isolation = (0..s)
        .map(|h| {
            (0..s)
                .filter(|&k| k != h)
                .map(|k| (eigenvalues[k] - eigenvalues[h]).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    SpectralData {
        multiplicities: clusters.iter().map(Vec::len).collect(),
        eigenvalues,
        projections,
        reduced_resolvents,
        isolation,
        cluster_tol,
        vectors,
        clusters,
        raw,
    }
}

/// Riesz projection `−(1/2πi)∮ (M − ζ)^{-1} dζ` by the trapezoidal rule on a
/// circle. Used only as an independent check of the spectral formulas.
pub fn contour_projection(m: &CMat, center: Complex64, radius: f64, nodes: usize) -> CMat {
    let d = m.nrows();
    let mut acc = CMat::zeros(d, d);
    for k in 0..nodes {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / nodes as f64);
        let zeta = center + w * radius;
        let shifted = CMat::identity(d, d) * zeta - m;
        let res = shifted.lu().try_inverse().expect("contour passes through the spectrum");
        // dζ = iρw dθ, and 1/(2πi)·iρw·(2π/M) = ρw/M
        acc += res * (w * radius / nodes as f64);
    }
    acc
}

pub fn identity_c(d: usize) -> CMat {
    CMat::identity(d, d) * c(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_google, load_edge_list};

    fn core(text: &str) -> SymmetricCore {
        build_t(&build_google(&load_edge_list(text).unwrap(), 0.85, None).unwrap())
    }

    #[test]
    fn two_cycle_core_equals_g() {
        let t = core("1\t2\n2\t1");
        let want = RMat::from_row_slice(2, 2, &[0.075, 0.925, 0.925, 0.075]);
        assert!((t.entries - want).abs().max() < 1e-16);
    }

    #[test]
    fn dangling_chain_core() {
        let t = core("1\t2");
        assert!((t.entries[(0, 1)] - 0.680074).abs() < 1e-6);
        assert!((t.entries[(0, 1)] - (0.925f64 * 0.5).sqrt()).abs() < 1e-16);
        assert_eq!(t.entries[(1, 1)], 0.5);
    }

    #[test]
    fn two_cycle_spectrum() {
        let sd = eigendecompose(&core("1\t2\n2\t1"), DEFAULT_CLUSTER_TOL);
        assert_eq!(sd.multiplicities, vec![1, 1]);
        assert!((sd.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((sd.eigenvalues[1] + 0.85).abs() < 1e-14);
        assert!((&sd.projections[0] - RMat::from_element(2, 2, 0.5)).abs().max() < 1e-14);
        assert!(sd.has_negative());
    }

    #[test]
    fn k3_is_degenerate() {
        let sd = eigendecompose(&core("1\t2\n1\t3\n2\t1\n2\t3\n3\t1\n3\t2"), DEFAULT_CLUSTER_TOL);
        assert_eq!(sd.multiplicities, vec![1, 2]);
        assert!((sd.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((sd.eigenvalues[1] + 0.425).abs() < 1e-14);
        assert!((sd.projections[1].trace() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn identity_has_single_cluster() {
        let sd = eigendecompose_matrix(&RMat::identity(3, 3), DEFAULT_CLUSTER_TOL);
        assert_eq!(sd.distinct_count(), 1);
        assert_eq!(sd.eigenvalues[0], 1.0);
        assert!((&sd.projections[0] - RMat::identity(3, 3)).abs().max() < 1e-14);
        assert_eq!(sd.reduced_resolvents[0], RMat::zeros(3, 3));
        assert!(sd.isolation[0].is_infinite());
    }

    #[test]
    fn contour_agrees_with_spectral_projection() {
        let t = core("1\t2\n2\t3\n3\t1\n3\t4");
        let sd = eigendecompose(&t, DEFAULT_CLUSTER_TOL);
        let tc = t.entries.map(c);
        for h in 0..sd.distinct_count() {
            let p = contour_projection(&tc, c(sd.eigenvalues[h]), sd.isolation[h] / 2.0, 64);
            assert!((p.map(|z| z.re) - &sd.projections[h]).abs().max() < 1e-10);
        }
    }
}
