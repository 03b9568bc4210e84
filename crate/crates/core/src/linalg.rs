//! Dense linear-algebra helpers shared by the spectral, walk and oracle code.
//!
//! Every operator in scope is normal, so eigendecompositions go through
//! Hermitian solvers: real symmetric matrices directly, and normal matrices by
//! splitting `M = H + iK` into commuting Hermitian parts.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(c)
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

/// Eigenpairs of a real symmetric matrix, eigenvalues descending.
pub fn sym_eigen(m: &RMat) -> (Vec<f64>, RMat) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = RMat::from_fn(m.nrows(), m.nrows(), |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues descending.
pub fn herm_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let herm = (m + m.adjoint()) * c(0.5);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(m.nrows(), m.nrows(), |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// Groups a descending list into runs whose adjacent gaps are below `tol`.
pub fn cluster_sorted(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (values[*g.last().unwrap()] - v).abs() < tol => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
}

/// Single-linkage clustering of complex values at distance `tol`.
pub fn cluster_complex(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for a in 0..n {
        for b in a + 1..n {
            if (values[a] - values[b]).norm() < tol {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for k in 0..n {
        let r = find(&mut parent, k);
        match root_of[r] {
            Some(g) => groups[g].push(k),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![k]);
            }
        }
    }
    groups
}

/// Eigendecomposition of a normal matrix with unitary eigenvector matrix.
#[derive(Debug, Clone)]
pub struct NormalEigen {
    pub values: Vec<Complex64>,
    pub vectors: CMat,
}

impl NormalEigen {
    /// Diagonalizes `m = H + iK` by eigendecomposing `H`, then `K` inside each
    /// eigenspace of `H`. `tol` separates distinct eigenvalues of `H`.
    pub fn new(m: &CMat, tol: f64) -> Self {
        let d = m.nrows();
        let h = (m + m.adjoint()) * c(0.5);
        let k = (m - m.adjoint()) * Complex64::new(0.0, -0.5);
        let (hvals, hvecs) = herm_eigen(&h);
        let mut values = Vec::with_capacity(d);
        let mut vectors = CMat::zeros(d, d);
        let mut col = 0;
        for group in cluster_sorted(&hvals, tol) {
            let q = hvecs.columns(group[0], group.len()).into_owned();
            let re = group.iter().map(|&g| hvals[g]).sum::<f64>() / group.len() as f64;
            let kq = q.adjoint() * &k * &q;
            let (kvals, kvecs) = herm_eigen(&kq);
            let block = &q * kvecs;
            for (j, &im) in kvals.iter().enumerate() {
                values.push(Complex64::new(re, im));
                vectors.set_column(col, &block.column(j));
                col += 1;
            }
        }
        NormalEigen { values, vectors }
    }

    pub fn from_real(m: &RMat, tol: f64) -> Self {
        Self::new(&to_complex(m), tol)
    }
}

pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

pub fn spectral_norm_real(m: &RMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Orthonormal basis for the column space of `m`, dropping singular values
/// below `rel_tol` times the largest.
pub fn range_basis(m: &RMat, rel_tol: f64) -> RMat {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > rel_tol * smax)
        .collect();
    RMat::from_fn(m.nrows(), keep.len(), |r, k| u[(r, keep[k])])
}

/// Rotates `v` so that its largest-magnitude entry is real and positive.
pub fn normalize_phase(v: &mut CVec) {
    let mut best = 0;
    for k in 0..v.len() {
        if v[k].norm() > v[best].norm() + 1e-12 {
            best = k;
        }
    }
    let z = v[best];
    if z.norm() > 0.0 {
        let phase = z.conj() / z.norm();
        *v *= phase;
    }
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns `assign[row] = col`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}
