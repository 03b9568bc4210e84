use crate::error::{Error, Result};
use crate::linalg::RMat;

use super::DirectedGraph;

/// Damped, teleporting row-stochastic matrix `G = αW + (1−α)e vᵀ`.
#[derive(Debug, Clone)]
pub struct GoogleMatrix {
    pub n: usize,
    pub alpha: f64,
    pub v: Vec<f64>,
    pub entries: RMat,
}

/// Builds `G` from the link structure. Dangling rows of `W` are patched with
/// the uniform vector; teleportation follows `v` (uniform when omitted).
pub fn build_google(g: &DirectedGraph, alpha: f64, v: Option<&[f64]>) -> Result<GoogleMatrix> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Invalid(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let n = g.n;
    let v = match v {
        None => vec![1.0 / n as f64; n],
        Some(v) => {
            if v.len() != n {
                return Err(Error::Invalid(format!("personalization has length {}, expected {n}", v.len())));
            }
            if v.iter().any(|&x| !(x >= 0.0)) {
                return Err(Error::Invalid("personalization has negative entries".into()));
            }
            let s: f64 = v.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::Invalid(format!("personalization sums to {s}, expected 1")));
            }
            v.to_vec()
        }
    };
    let mut w = RMat::zeros(n, n);
    for &(s, d) in &g.edges {
        w[(s - 1, d - 1)] = 1.0 / g.out_degree[s - 1] as f64;
    }
    for j in 0..n {
        if g.dangling[j] {
            w.row_mut(j).fill(1.0 / n as f64);
        }
    }
    let entries = RMat::from_fn(n, n, |r, k| alpha * w[(r, k)] + (1.0 - alpha) * v[k]);
    Ok(GoogleMatrix { n, alpha, v, entries })
}

/// Power iteration `πᵀ ← πᵀG` from the uniform vector until the ℓ¹ residual
/// `‖πᵀG − πᵀ‖₁` drops to `tol`.
pub fn classical_pagerank(g: &GoogleMatrix, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::Invalid("tol must be positive".into()));
    }
    let n = g.n;
    let mut pi = nalgebra::DVector::from_element(n, 1.0 / n as f64);
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let mut next = g.entries.tr_mul(&pi);
        residual = (&next - &pi).lp_norm(1);
        if residual <= tol {
            return Ok(pi.iter().copied().collect());
        }
        let s = next.sum();
        next /= s;
        pi = next;
    }
    Err(Error::NoConvergence { iterations: max_iter, residual })
}
