use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{c, spectral_norm_real, CMat, RMat};

use super::GoogleMatrix;

/// `G(χ) = G + Σ_{l≥1} χ^l G^(l)` with geometric norm envelope
/// `‖G^(l)‖ ≤ A0·B0^(l−1)` (spectral norm).
#[derive(Debug, Clone)]
pub struct MatrixSeries {
    pub base: RMat,
    /// `terms[l-1] = G^(l)`.
    pub terms: Vec<RMat>,
    pub bound_a0: f64,
    pub bound_b0: f64,
}

const ROW_SUM_TOL: f64 = 1e-12;

impl MatrixSeries {
    /// Validates rows of every term sum to zero, then fits or checks the
    /// envelope. Fitting takes `B0 = 1` (the smallest admissible) and the
    /// smallest `A0` that works with it.
    pub fn new(base: RMat, terms: Vec<RMat>, a0: Option<f64>, b0: Option<f64>) -> Result<Self> {
        let n = base.nrows();
        if base.ncols() != n {
            return Err(Error::Perturbation("base matrix is not square".into()));
        }
        if base.iter().any(|&g| !(g > 0.0)) {
            return Err(Error::Perturbation("base matrix has a nonpositive entry".into()));
        }
        for (l, t) in terms.iter().enumerate() {
            if t.nrows() != n || t.ncols() != n {
                return Err(Error::Perturbation(format!("order {} term has wrong shape", l + 1)));
            }
            for r in 0..n {
                let s = t.row(r).sum();
                if s.abs() > ROW_SUM_TOL {
                    return Err(Error::Perturbation(format!(
                        "order {} row {} sums to {s:e}, expected 0",
                        l + 1,
                        r + 1
                    )));
                }
            }
        }
        let norms: Vec<f64> = terms.iter().map(spectral_norm_real).collect();
        let b0 = b0.unwrap_or(1.0);
        if !(b0 > 0.0) || !b0.is_finite() {
            return Err(Error::Perturbation(format!("B0 must be positive, got {b0}")));
        }
        let fitted = norms
            .iter()
            .enumerate()
            .map(|(l, &nm)| nm / b0.powi(l as i32))
            .fold(0.0, f64::max);
        let a0 = match a0 {
            None => fitted,
            Some(a0) => {
                if !(a0 >= 0.0) || !a0.is_finite() {
                    return Err(Error::Perturbation(format!("A0 must be nonnegative, got {a0}")));
                }
                if fitted > a0 * (1.0 + 1e-12) {
                    return Err(Error::Perturbation(format!(
                        "stored terms violate ‖G^(l)‖ ≤ A0·B0^(l−1) for A0={a0}, B0={b0}"
                    )));
                }
                a0
            }
        };
        Ok(MatrixSeries { base, terms, bound_a0: a0, bound_b0: b0 })
    }

    pub fn unperturbed(base: RMat) -> Self {
        MatrixSeries { base, terms: Vec::new(), bound_a0: 0.0, bound_b0: 1.0 }
    }

    pub fn n(&self) -> usize {
        self.base.nrows()
    }

    /// `G^(l)`, zero past the stored orders and the base at `l = 0`.
    pub fn term(&self, l: usize) -> RMat {
        if l == 0 {
            self.base.clone()
        } else {
            self.terms.get(l - 1).cloned().unwrap_or_else(|| RMat::zeros(self.n(), self.n()))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.iter().all(|&x| x == 0.0))
    }

    pub fn evaluate(&self, chi: f64) -> RMat {
        let mut g = self.base.clone();
        let mut p = 1.0;
        for t in &self.terms {
            p *= chi;
            g += t * p;
        }
        g
    }

    pub fn evaluate_complex(&self, chi: num_complex::Complex64) -> CMat {
        let mut g = self.base.map(c);
        let mut p = c(1.0);
        for t in &self.terms {
            p *= chi;
            g += t.map(|x| c(x) * p);
        }
        g
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct SpecEntry {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SpecTerm {
    pub order: usize,
    pub entries: Vec<SpecEntry>,
}

/// JSON perturbation file: sparse per-order entries with 1-based indices.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub order_terms: Vec<SpecTerm>,
    #[serde(rename = "A0", default)]
    pub a0: Option<f64>,
    #[serde(rename = "B0", default)]
    pub b0: Option<f64>,
}

impl PerturbationSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }

    pub fn to_series(&self, g: &GoogleMatrix) -> Result<MatrixSeries> {
        let n = g.n;
        let k = self.order_terms.iter().map(|t| t.order).max().unwrap_or(0);
        let mut terms = vec![RMat::zeros(n, n); k];
        let mut seen = std::collections::BTreeSet::new();
        for t in &self.order_terms {
            if t.order == 0 {
                return Err(Error::Perturbation("orders start at 1".into()));
            }
            for e in &t.entries {
                if e.i == 0 || e.j == 0 || e.i > n || e.j > n {
                    return Err(Error::Perturbation(format!("entry ({}, {}) outside 1..={n}", e.i, e.j)));
                }
                if !e.value.is_finite() {
                    return Err(Error::Perturbation(format!("entry ({}, {}) is not finite", e.i, e.j)));
                }
                if !seen.insert((t.order, e.i, e.j)) {
                    return Err(Error::Perturbation(format!(
                        "duplicate entry ({}, {}) at order {}",
                        e.i, e.j, t.order
                    )));
                }
                terms[t.order - 1][(e.i - 1, e.j - 1)] = e.value;
            }
        }
        MatrixSeries::new(g.entries.clone(), terms, self.a0, self.b0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_google, load_edge_list};

    fn two_cycle() -> GoogleMatrix {
        build_google(&load_edge_list("1\t2\n2\t1").unwrap(), 0.85, None).unwrap()
    }

    #[test]
    fn one_term_summation() {
        let spec = PerturbationSpec::from_json(
            r#"{"order_terms":[{"order":1,"entries":[{"i":1,"j":1,"value":0.1},{"i":1,"j":2,"value":-0.1}]}]}"#,
        )
        .unwrap();
        let gs = spec.to_series(&two_cycle()).unwrap();
        let want = RMat::from_row_slice(2, 2, &[0.076, 0.924, 0.925, 0.075]);
        assert!((gs.evaluate(0.01) - want).abs().max() < 1e-15);
        assert!((gs.bound_a0 - 0.1 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(gs.bound_b0, 1.0);
    }

    #[test]
    fn rejects_unbalanced_rows() {
        let spec = PerturbationSpec::from_json(
            r#"{"order_terms":[{"order":1,"entries":[{"i":1,"j":1,"value":0.1}]}]}"#,
        )
        .unwrap();
        assert!(matches!(spec.to_series(&two_cycle()), Err(Error::Perturbation(_))));
    }

    #[test]
    fn rejects_violated_envelope() {
        let spec = PerturbationSpec::from_json(
            r#"{"order_terms":[{"order":2,"entries":[{"i":1,"j":1,"value":0.1},{"i":1,"j":2,"value":-0.1}]}],"A0":0.01,"B0":1.0}"#,
        )
        .unwrap();
        assert!(spec.to_series(&two_cycle()).is_err());
    }

    #[test]
    fn empty_spec_is_zero() {
        let spec = PerturbationSpec::from_json(r#"{"order_terms":[]}"#).unwrap();
        let gs = spec.to_series(&two_cycle()).unwrap();
        assert!(gs.is_zero());
        assert_eq!(gs.bound_a0, 0.0);
    }
}
