//! Brute-force reference for every perturbed quantity.
//!
//! Real χ: build `G(χ)`, `T(χ)`, `U(χ)` densely, eigendecompose `U(χ)`, assign
//! each eigenvalue to an unperturbed cluster, and evaluate `I_q^(χ)` from the
//! clusters that meet `H_e`. Complex χ: continue `U(χ)` holomorphically (principal
//! square roots, transposes instead of adjoints) and take Riesz projections, so
//! that Cauchy coefficient extraction sees an analytic function.
//!
//! Nothing here touches the series machinery in [`crate::perturbation`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::MatrixSeries;
use crate::linalg::{c, cluster_complex, hungarian, CMat, CVec, NormalEigen, RMat};
use crate::series::RealSeries;
use crate::spectral::{contour_projection, core_of, eigendecompose_matrix};
use crate::szegedy::{build_walk_capped, fold, he_eigenpairs, index, swap_matrix, Variant, DEFAULT_DIM_CAP};

/// Quadrature nodes for Riesz projections.
pub const RIESZ_NODES: usize = 64;

/// Unperturbed cluster structure of `U` that the oracle matches against.
#[derive(Debug, Clone)]
pub struct OracleContext {
    pub gs: MatrixSeries,
    pub n: usize,
    pub centers: Vec<Complex64>,
    pub multiplicities: Vec<usize>,
    pub meets_he: Vec<bool>,
    /// Distance to the nearest other center.
    pub isolation: Vec<f64>,
}

impl OracleContext {
    pub fn new(gs: &MatrixSeries, cluster_tol: f64) -> Result<Self> {
        let n = gs.n();
        let ops = build_walk_capped(&gs.base, DEFAULT_DIM_CAP)?;
        let spec = eigendecompose_matrix(&core_of(&gs.base), cluster_tol);
        let ws = he_eigenpairs(&ops, &spec)?;
        let eig = NormalEigen::from_real(&ops.u, cluster_tol);
        let groups = cluster_complex(&eig.values, cluster_tol);
        let centers: Vec<Complex64> = groups
            .iter()
            .map(|g| g.iter().map(|&k| eig.values[k]).sum::<Complex64>() / g.len() as f64)
            .collect();
        let multiplicities = groups.iter().map(|g| g.len()).collect();
        let meets_he = centers
            .iter()
            .map(|&z| ws.pairs.iter().any(|p| (p.mu - z).norm() < 10.0 * cluster_tol))
            .collect();
        let isolation = (0..centers.len())
            .map(|h| {
                (0..centers.len())
                    .filter(|&k| k != h)
                    .map(|k| (centers[k] - centers[h]).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Ok(OracleContext { gs: gs.clone(), n, centers, multiplicities, meets_he, isolation })
    }

    fn node(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.n {
            return Err(Error::Invalid(format!("node {i} outside 1..={}", self.n)));
        }
        Ok(i - 1)
    }
}

/// Direct evaluation of the perturbed walk at one real χ.
#[derive(Debug, Clone)]
pub struct OracleSample {
    pub chi: f64,
    pub g: RMat,
    pub t: RMat,
    pub u: RMat,
    /// `(μ(χ), eigenvector, unperturbed cluster)`.
    pub spectrum: Vec<(Complex64, CVec, usize)>,
    /// `(node, m, I_q^(χ))`.
    pub iq: Vec<(usize, u64, f64)>,
}

impl OracleSample {
    /// `⟨j,i|U(χ)^{2m}Π(χ)|ψ(0)⟩` for `j = 1..N`.
    pub fn amplitudes(&self, ctx: &OracleContext, psi0: &CVec, i: usize, m: u64) -> Result<Vec<Complex64>> {
        let i0 = ctx.node(i)?;
        let mut amps = vec![c(0.0); ctx.n];
        for (mu, v, h) in &self.spectrum {
            if !ctx.meets_he[*h] {
                continue;
            }
            let w = mu.powu(2 * m as u32) * v.dotc(psi0);
            for (j, a) in amps.iter_mut().enumerate() {
                *a += w * v[index(ctx.n, j, i0)];
            }
        }
        Ok(amps)
    }

    /// Eigenvalues assigned to cluster `h`.
    pub fn cluster_values(&self, h: usize) -> Vec<Complex64> {
        self.spectrum.iter().filter(|s| s.2 == h).map(|s| s.0).collect()
    }
}

/// `G(χ)` for real χ, rejected unless strictly positive and row-stochastic.
pub fn admissible_g(gs: &MatrixSeries, chi: f64) -> Result<RMat> {
    if !chi.is_finite() {
        return Err(Error::Chi { chi, msg: "χ is not finite".into() });
    }
    let g = gs.evaluate(chi);
    if let Some(x) = g.iter().find(|&&x| x <= 0.0) {
        return Err(Error::Chi { chi, msg: format!("G(χ) has a non-positive entry {x}") });
    }
    for r in 0..g.nrows() {
        let s: f64 = g.row(r).sum();
        if (s - 1.0).abs() > 1e-10 {
            return Err(Error::Chi { chi, msg: format!("row {} of G(χ) sums to {s}", r + 1) });
        }
    }
    Ok(g)
}

/// Assigns perturbed eigenvalues to unperturbed clusters by optimal matching
/// over cluster slots; an eigenvalue whose runner-up cluster is within 10% of
/// its assigned distance is ambiguous.
pub fn assign_clusters(ctx: &OracleContext, values: &[Complex64]) -> Result<Vec<usize>> {
    let slots: Vec<usize> = ctx.multiplicities.iter().enumerate().flat_map(|(h, &m)| std::iter::repeat_n(h, m)).collect();
    if slots.len() != values.len() {
        return Err(Error::Ambiguous(format!("{} eigenvalues for {} slots", values.len(), slots.len())));
    }
    let cost: Vec<Vec<f64>> =
        values.iter().map(|&z| slots.iter().map(|&h| (z - ctx.centers[h]).norm()).collect()).collect();
    let assign: Vec<usize> = hungarian(&cost).into_iter().map(|s| slots[s]).collect();
    for (k, &h) in assign.iter().enumerate() {
        let d = (values[k] - ctx.centers[h]).norm();
        let runner = (0..ctx.centers.len())
            .filter(|&o| o != h)
            .map(|o| (values[k] - ctx.centers[o]).norm())
            .fold(f64::INFINITY, f64::min);
        if runner <= 1.1 * d {
            return Err(Error::Ambiguous(format!(
                "eigenvalue {} is {d:.3e} from its cluster and {runner:.3e} from the next",
                values[k]
            )));
        }
    }
    Ok(assign)
}

/// Dense evaluation at real χ for every `(node, m)` pair requested.
pub fn evaluate_at(
    ctx: &OracleContext,
    chi: f64,
    psi0: &CVec,
    nodes: &[usize],
    ms: &[u64],
    variant: Variant,
) -> Result<OracleSample> {
    let g = admissible_g(&ctx.gs, chi)?;
    let t = core_of(&g);
    let ops = build_walk_capped(&g, DEFAULT_DIM_CAP)?;
    let d = ops.u.nrows();
    let defect = (ops.u.transpose() * &ops.u - RMat::identity(d, d)).abs().max();
    if defect > 1e-9 {
        return Err(Error::Chi { chi, msg: format!("U(χ) deviates from unitarity by {defect:.3e}") });
    }
    let eig = NormalEigen::from_real(&ops.u, 1e-12);
    let assign = assign_clusters(ctx, &eig.values)?;
    let spectrum = (0..d).map(|k| (eig.values[k], eig.vectors.column(k).into_owned(), assign[k])).collect();
    let mut sample = OracleSample { chi, g, t, u: ops.u, spectrum, iq: Vec::new() };
    for &i in nodes {
        for &m in ms {
            let amps = sample.amplitudes(ctx, psi0, i, m)?;
            sample.iq.push((i, m, fold(&amps, variant)));
        }
    }
    Ok(sample)
}

/// Holomorphic continuation of `U(χ)` to complex χ.
pub fn walk_complex(ctx: &OracleContext, chi: Complex64) -> Result<CMat> {
    let n = ctx.n;
    let g = ctx.gs.evaluate_complex(chi);
    for j in 0..n {
        for k in 0..n {
            let g0 = ctx.gs.base[(j, k)];
            if (g[(j, k)] - g0).norm() >= g0 {
                return Err(Error::Chi {
                    chi: chi.norm(),
                    msg: format!("g_{}{}(χ) leaves the disc of convergence of its square root", j + 1, k + 1),
                });
            }
        }
    }
    let mut a = CMat::zeros(n * n, n);
    for j in 0..n {
        for k in 0..n {
            a[(index(n, j, k), j)] = g[(j, k)].sqrt();
        }
    }
    let b = &a * a.transpose();
    let s = swap_matrix(n).map(c);
    Ok(s * (b * c(2.0) - CMat::identity(n * n, n * n)))
}

/// `Π(χ)` at complex χ: Riesz projections around every cluster meeting `H_e`.
pub fn he_projection_complex(ctx: &OracleContext, chi: Complex64) -> Result<(CMat, CMat)> {
    let u = walk_complex(ctx, chi)?;
    let d = u.nrows();
    let mut pi = CMat::zeros(d, d);
    for h in (0..ctx.centers.len()).filter(|&h| ctx.meets_he[h]) {
        let radius = 0.5 * ctx.isolation[h].min(1.0);
        let p = contour_projection(&u, ctx.centers[h], radius, RIESZ_NODES);
        let tr = p.trace();
        if (tr - c(ctx.multiplicities[h] as f64)).norm() > 1e-6 {
            return Err(Error::Chi {
                chi: chi.norm(),
                msg: format!("contour around {} holds trace {tr}, expected {}", ctx.centers[h], ctx.multiplicities[h]),
            });
        }
        pi += p;
    }
    Ok((u, pi))
}

/// Holomorphic amplitudes `a_j(χ)` at complex χ.
pub fn amplitudes_complex(ctx: &OracleContext, chi: Complex64, psi0: &CVec, i: usize, m: u64) -> Result<Vec<Complex64>> {
    let i0 = ctx.node(i)?;
    let (u, pi) = he_projection_complex(ctx, chi)?;
    let mut w = pi * psi0;
    for _ in 0..2 * m {
        w = &u * w;
    }
    Ok((0..ctx.n).map(|j| w[index(ctx.n, j, i0)]).collect())
}

/// Analytic continuation of `I_q`: `N(χ)·conj(N(conj χ))` (or the per-`j`
/// sum of such products for the norm variant), equal to `I_q^(χ)` on the
/// real axis.
pub fn iq_complex(ctx: &OracleContext, chi: Complex64, psi0: &CVec, i: usize, m: u64, variant: Variant) -> Result<Complex64> {
    let a = amplitudes_complex(ctx, chi, psi0, i, m)?;
    let b = amplitudes_complex(ctx, chi.conj(), psi0, i, m)?;
    Ok(match variant {
        Variant::Coherent => a.iter().sum::<Complex64>() * b.iter().sum::<Complex64>().conj(),
        Variant::Norm => a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum(),
    })
}

/// Cauchy coefficient estimate with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct CoeffEstimate {
    pub value: Complex64,
    /// `|c_n(M) − c_n(M/2)|` plus a rounding floor `ε·max|f|/ρⁿ`.
    pub error: f64,
}

/// `c_n ≈ (1/M) Σ_k f(ρω^k) ρ^{−n} ω^{−kn}`, `ω = e^{2πi/M}`.
pub fn coeff_oracle<F>(f: F, rho: f64, n: usize, samples: usize) -> Result<CoeffEstimate>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if samples < 4 * n.max(1) || !samples.is_power_of_two() {
        return Err(Error::Invalid(format!("sample count {samples} must be a power of two ≥ 4n")));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Invalid(format!("sampling radius {rho} must be positive")));
    }
    let values: Vec<Complex64> = (0..samples)
        .map(|k| f(Complex64::from_polar(rho, 2.0 * PI * k as f64 / samples as f64)))
        .collect::<Result<_>>()?;
    coeff_from_samples(&values, rho, n)
}

/// Extraction from samples already taken at `ρω^k`, so one set of samples
/// serves every `n`.
pub fn coeff_from_samples(values: &[Complex64], rho: f64, n: usize) -> Result<CoeffEstimate> {
    let samples = values.len();
    if samples < 4 * n.max(1) || !samples.is_power_of_two() {
        return Err(Error::Invalid(format!("sample count {samples} must be a power of two ≥ 4n")));
    }
    if let Some(z) = values.iter().find(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Invalid(format!("non-finite sample {z}")));
    }
    let extract = |stride: usize| -> Complex64 {
        let m = samples / stride;
        let sum: Complex64 = (0..m)
            .map(|k| values[k * stride] * Complex64::from_polar(1.0, -2.0 * PI * (k * n) as f64 / m as f64))
            .sum();
        sum / m as f64 / rho.powi(n as i32)
    };
    let full = extract(1);
    let half = extract(2);
    let peak = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let floor = 16.0 * f64::EPSILON * peak / rho.powi(n as i32);
    Ok(CoeffEstimate { value: full, error: (full - half).norm() + floor })
}

/// One row of a truncation report.
#[derive(Debug, Clone)]
pub struct ErrorRow {
    pub chi: f64,
    pub quantity: String,
    pub oracle: f64,
    pub truncated: f64,
    pub abs_error: f64,
    /// `None` when the certified tail is void (`B|χ| ≥ 1`).
    pub tail_bound: Option<f64>,
    pub within_bound: bool,
}

#[derive(Debug, Clone)]
pub struct TruncationReport {
    pub order: usize,
    pub rows: Vec<ErrorRow>,
    /// Log-log regression slope of error against χ.
    pub slope: Option<f64>,
}

/// Absolute allowance for rounding in the dense oracle when checking a
/// certified tail bound.
pub const ORACLE_FLOOR: f64 = 1e-12;

/// Compares a truncated real series with oracle values on a χ grid.
pub fn compare_truncation(
    quantity: &str,
    series: &RealSeries,
    oracle: &[(f64, f64)],
    tail: impl Fn(f64) -> Option<f64>,
) -> TruncationReport {
    let rows: Vec<ErrorRow> = oracle
        .iter()
        .map(|&(chi, o)| {
            let t = series.evaluate(chi);
            let err = (o - t).abs();
            let tb = tail(chi);
            ErrorRow {
                chi,
                quantity: quantity.to_string(),
                oracle: o,
                truncated: t,
                abs_error: err,
                tail_bound: tb,
                within_bound: tb.is_some_and(|b| err <= b + ORACLE_FLOOR),
            }
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.chi, r.abs_error)).collect();
    TruncationReport { order: series.order(), slope: loglog_slope(&pts), rows }
}

/// Least-squares slope of `ln err` against `ln χ`; `None` with fewer than two
/// positive errors.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|&(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Dyadic grid `0.1·2^{−j}`, `j = 0, 1, …`, keeping the first `count` points
/// at or below `limit`.
pub fn dyadic_grid(limit: f64, count: usize) -> Vec<f64> {
    (0..200).map(|j| 0.1 * 0.5f64.powi(j)).filter(|&x| x <= limit).take(count).collect()
}
