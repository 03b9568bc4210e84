use crate::error::{Error, Result};
use crate::graph::MatrixSeries;
use crate::linalg::RMat;
use crate::series::{binomial_half, RealSeries, RealSeriesMatrix, Series};
use crate::szegedy::{index, swap_matrix};

/// Series of `√(g + Σ_n χ^n g^(n))`, truncated at order `k`.
///
/// Coefficient `n` is `√g Σ_r C(1/2, r)·[x^r]_n` with `x = Σ_p χ^p g^(p)/g`;
/// `[x^r]_n` sums `Π g^(p_i)/g` over compositions `p_1+…+p_r = n`.
pub fn sqrt_series(g: f64, deltas: &[f64], k: usize) -> Result<RealSeries> {
    if !(g > 0.0) {
        return Err(Error::Perturbation(format!("square root of nonpositive base {g}")));
    }
    let mut x = vec![0.0; k + 1];
    for (p, &d) in deltas.iter().enumerate().take(k) {
        x[p + 1] = d / g;
    }
    let x = RealSeries::new(x);
    let b = binomial_half(k);
    let mut out = RealSeries::constant(1.0, k);
    let mut pow = RealSeries::constant(1.0, k);
    for &br in b.iter().skip(1) {
        pow = pow.mul(&x);
        out = out.add(&pow.scale(br));
    }
    Ok(out.scale(g.sqrt()))
}

fn entry_series(gs: &MatrixSeries, i: usize, j: usize, k: usize) -> Result<RealSeries> {
    let deltas: Vec<f64> = (1..=k).map(|l| gs.term(l)[(i, j)]).collect();
    sqrt_series(gs.base[(i, j)], &deltas, k)
        .map_err(|_| Error::Perturbation(format!("zero base entry g_{}{}", i + 1, j + 1)))
}

/// `T(χ)` with `T^(n)_ij = [√g_ij(χ)·√g_ji(χ)]_n`.
pub fn t_series(gs: &MatrixSeries, k: usize) -> Result<RealSeriesMatrix> {
    let n = gs.n();
    let roots: Vec<Vec<RealSeries>> = (0..n)
        .map(|i| (0..n).map(|j| entry_series(gs, i, j, k)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut coeffs = vec![RMat::zeros(n, n); k + 1];
    for i in 0..n {
        for j in i..n {
            let prod = roots[i][j].mul(&roots[j][i]);
            for (l, c) in coeffs.iter_mut().enumerate() {
                c[(i, j)] = prod.coeffs[l];
                c[(j, i)] = prod.coeffs[l];
            }
        }
    }
    Ok(Series::new(coeffs))
}

/// `A(χ)`: the `N²×N` matrix whose column `j` is `|ψ_j(χ)⟩`.
pub fn psi_series(gs: &MatrixSeries, k: usize) -> Result<RealSeriesMatrix> {
    let n = gs.n();
    let mut coeffs = vec![RMat::zeros(n * n, n); k + 1];
    for j in 0..n {
        for kk in 0..n {
            let s = entry_series(gs, j, kk, k)?;
            for (l, c) in coeffs.iter_mut().enumerate() {
                c[(index(n, j, kk), j)] = s.coeffs[l];
            }
        }
    }
    Ok(Series::new(coeffs))
}

/// `B(χ) = A(χ)A(χ)ᵀ`.
pub fn b_series(psi: &RealSeriesMatrix) -> RealSeriesMatrix {
    psi.mul(&psi.map(|a| a.transpose()))
}

/// `U(χ) = S_w(2B(χ) − I)`: `U^(0) = U`, `U^(n) = 2S_w B^(n)`.
pub fn u_series(gs: &MatrixSeries, k: usize) -> Result<RealSeriesMatrix> {
    let b = b_series(&psi_series(gs, k)?);
    let d = gs.n() * gs.n();
    let sw = swap_matrix(gs.n());
    let mut coeffs: Vec<RMat> = b.coeffs.iter().map(|bn| &sw * bn * 2.0).collect();
    coeffs[0] -= &sw;
    debug_assert_eq!(coeffs[0].nrows(), d);
    Ok(Series::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::binomial_half;

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

    /// `Σ_r C(1/2,r)/g^r Σ_{p_1+…+p_r=n} Π g^(p_i)`, enumerated literally.
    fn beta(g: f64, d: &[f64], n: usize) -> f64 {
        let b = binomial_half(n);
        (1..=n)
            .map(|r| {
                let inner: f64 = compositions(n, r)
                    .iter()
                    .map(|ps| ps.iter().map(|&p| d.get(p - 1).copied().unwrap_or(0.0)).product::<f64>())
                    .sum();
                b[r] / g.powi(r as i32) * inner
            })
            .sum()
    }

    #[test]
    fn sqrt_first_order() {
        assert!((sqrt_series(1.0, &[1.0], 1).unwrap().coeffs[1] - 0.5).abs() < 1e-15);
        let c1 = sqrt_series(0.925, &[-0.1], 1).unwrap().coeffs[1];
        assert!((c1 - (-0.1 / (2.0 * 0.925f64.sqrt()))).abs() < 1e-15);
        assert!((c1 + 0.0519875).abs() < 1e-7);
    }

    #[test]
    fn sqrt_of_constant() {
        let s = sqrt_series(0.3, &[0.0, 0.0], 4).unwrap();
        assert_eq!(s.coeffs[0], 0.3f64.sqrt());
        assert!(s.coeffs[1..].iter().all(|&x| x == 0.0));
        assert!(sqrt_series(0.0, &[], 2).is_err());
    }

    #[test]
    fn sqrt_matches_literal_compositions() {
        let (g, d) = (0.4, [0.03, -0.02, 0.05, 0.01]);
        let s = sqrt_series(g, &d, 4).unwrap();
        for n in 1..=4 {
            assert!((s.coeffs[n] - g.sqrt() * beta(g, &d, n)).abs() < 1e-15);
        }
    }

    #[test]
    fn two_cycle_first_order_core() {
        let base = RMat::from_row_slice(2, 2, &[0.075, 0.925, 0.925, 0.075]);
        let g1 = RMat::from_row_slice(2, 2, &[0.1, -0.1, 0.0, 0.0]);
        let gs = MatrixSeries::new(base, vec![g1], None, None).unwrap();
        let t = t_series(&gs, 2).unwrap();
        assert!((t.coeffs[1][(0, 1)] + 0.05).abs() < 1e-15);
        assert!((t.coeffs[1][(0, 0)] - 0.1).abs() < 1e-15);
        assert_eq!(t.coeffs[1][(1, 1)], 0.0);
    }

    #[test]
    fn core_matches_three_part_decomposition() {
        let base = RMat::from_row_slice(3, 3, &[0.2, 0.5, 0.3, 0.4, 0.4, 0.2, 0.1, 0.3, 0.6]);
        let g1 = RMat::from_row_slice(3, 3, &[0.02, -0.03, 0.01, -0.01, 0.0, 0.01, 0.02, 0.02, -0.04]);
        let g2 = RMat::from_row_slice(3, 3, &[-0.01, 0.0, 0.01, 0.03, -0.01, -0.02, 0.0, -0.02, 0.02]);
        let gs = MatrixSeries::new(base.clone(), vec![g1.clone(), g2.clone()], None, None).unwrap();
        let t = t_series(&gs, 4).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let tij = (base[(i, j)] * base[(j, i)]).sqrt();
                let dij = [g1[(i, j)], g2[(i, j)]];
                let dji = [g1[(j, i)], g2[(j, i)]];
                for n in 1..=4 {
                    let i1 = tij * beta(base[(j, i)], &dji, n);
                    let i2: f64 = (1..n)
                        .map(|k| tij * beta(base[(i, j)], &dij, k) * beta(base[(j, i)], &dji, n - k))
                        .sum();
                    let i3 = tij * beta(base[(i, j)], &dij, n);
                    assert!((t.coeffs[n][(i, j)] - (i1 + i2 + i3)).abs() < 1e-15, "n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn u_first_order_form() {
        let base = RMat::from_row_slice(2, 2, &[0.075, 0.925, 0.5, 0.5]);
        let g1 = RMat::from_row_slice(2, 2, &[0.05, -0.05, -0.02, 0.02]);
        let gs = MatrixSeries::new(base, vec![g1], None, None).unwrap();
        let a = psi_series(&gs, 1).unwrap();
        let u = u_series(&gs, 1).unwrap();
        let sw = swap_matrix(2);
        let want = &sw * (&a.coeffs[1] * a.coeffs[0].transpose() + &a.coeffs[0] * a.coeffs[1].transpose()) * 2.0;
        assert!((&u.coeffs[1] - want).abs().max() < 1e-15);
        let walk = crate::szegedy::build_walk_capped(&gs.base, 16).unwrap();
        assert!((&u.coeffs[0] - walk.u).abs().max() < 1e-15);
    }

    #[test]
    fn zero_perturbation_has_vanishing_terms() {
        let base = RMat::from_row_slice(2, 2, &[0.075, 0.925, 0.5, 0.5]);
        let gs = MatrixSeries::unperturbed(base);
        let t = t_series(&gs, 3).unwrap();
        let u = u_series(&gs, 3).unwrap();
        for n in 1..=3 {
            assert_eq!(t.coeffs[n].abs().max(), 0.0);
            assert_eq!(u.coeffs[n].abs().max(), 0.0);
        }
    }
}
