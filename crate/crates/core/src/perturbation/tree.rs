//! Eigenvalue series of `T(χ)`, including the reduction process for
//! degenerate eigenvalues.
//!
//! A degenerate eigenvalue `ν` of a level operator `L(χ)` spawns the child
//! operator `L₁(χ) = (L(χ) − ν)P(χ)/χ`, whose eigenvalues at `χ = 0` on
//! `R(P)` are the first-order splittings. Recursion stops at simple
//! eigenvalues, or when the operator's known order runs out (each level
//! loses one order). On `R(I − P(χ))` the child operator vanishes; if a child
//! eigenvalue is itself zero, that complement is shifted away by `c(I − P(χ))`
//! so the child keeps a positive isolation distance.

use crate::error::{Error, Result};
use crate::linalg::{c, real_part, sym_eigen, CMat, RMat};
use crate::series::{RealSeries, RealSeriesMatrix, SeriesMatrix};
use crate::spectral::{eigendecompose_matrix, SpectralData};

use super::kato::{ClusterExpansion, Eigenbasis};

/// Children closer than this to zero trigger the complement shift.
pub const ZERO_CHILD_TOL: f64 = 1e-7;

fn complex_terms(ts: &RealSeriesMatrix, k: usize) -> Vec<CMat> {
    (1..=k).map(|n| ts.coeffs.get(n).map(|m| m.map(c)).unwrap_or_else(|| CMat::zeros(ts.coeffs[0].nrows(), ts.coeffs[0].nrows()))).collect()
}

/// `P_h(χ)` to order `k`.
pub fn projection_series(spec: &SpectralData, ts: &RealSeriesMatrix, h: usize, k: usize) -> SeriesMatrix {
    let basis = Eigenbasis::from_symmetric(spec);
    let mut ex = ClusterExpansion::new(&basis, h, &complex_terms(ts, k));
    SeriesMatrix::new(ex.projection_series())
}

/// `λ_h(χ)` to order `k` for a simple eigenvalue.
pub fn eigenvalue_series_simple(spec: &SpectralData, ts: &RealSeriesMatrix, h: usize, k: usize) -> Result<RealSeries> {
    if spec.multiplicities[h] != 1 {
        return Err(Error::Invalid(format!(
            "eigenvalue {} has multiplicity {}; use the reduction tree",
            spec.eigenvalues[h], spec.multiplicities[h]
        )));
    }
    let basis = Eigenbasis::from_symmetric(spec);
    let mut ex = ClusterExpansion::new(&basis, h, &complex_terms(ts, k));
    Ok(RealSeries::new(ex.eigenvalue_series().iter().map(|z| z.re).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Internal,
    SimpleLeaf,
    /// Still degenerate when the order ran out; carries the group mean.
    UnresolvedLeaf,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub level: usize,
    /// Eigenvalue of the level operator at χ = 0 (λ_h at level 0).
    pub value: f64,
    pub multiplicity: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Level operator coefficients this node is an eigenvalue of (shift applied).
    pub operator: Vec<RMat>,
    /// Eigenprojection series of this node for `operator`.
    pub projection: Vec<RMat>,
    pub reduced_resolvent: RMat,
    pub isolation: f64,
    /// Complement shift `c` applied to `operator`.
    pub shift: f64,
    /// Eigenvalue series of this node for `operator`, for leaves.
    pub own_series: Option<RealSeries>,
    pub kind: NodeKind,
}

#[derive(Debug, Clone)]
pub struct Leaf {
    pub node: usize,
    pub root: usize,
    pub multiplicity: usize,
    pub resolved: bool,
    /// `λ_h + χν₁ + … + χ^d ν_leaf(χ)`, to the tree order.
    pub series: RealSeries,
}

#[derive(Debug, Clone)]
pub struct ShiftEvent {
    pub level: usize,
    pub parent: Option<usize>,
    pub shift: f64,
}

#[derive(Debug, Clone)]
pub struct EigenvalueTree {
    pub order: usize,
    pub nodes: Vec<TreeNode>,
    /// One root per distinct eigenvalue of `T`, in `SpectralData` order.
    pub roots: Vec<usize>,
    pub leaves: Vec<Leaf>,
    pub shifts: Vec<ShiftEvent>,
}

struct Builder {
    nodes: Vec<TreeNode>,
    shifts: Vec<ShiftEvent>,
    tol: f64,
    depth_cap: usize,
}

impl Builder {
    fn expand_level(
        &mut self,
        ops: Vec<RMat>,
        range: Option<Vec<RMat>>,
        level: usize,
        parent: Option<usize>,
    ) -> Result<Vec<usize>> {
        let kl = ops.len() - 1;
        let d = ops[0].nrows();
        let (ops, shift) = match &range {
            None => (ops, 0.0),
            Some(pr) => {
                let (pvals, pvecs) = sym_eigen(&pr[0]);
                let keep: Vec<usize> = (0..d).filter(|&k| pvals[k] > 0.5).collect();
                let q = RMat::from_fn(d, keep.len(), |r, k| pvecs[(r, keep[k])]);
                let (nus, _) = sym_eigen(&(q.transpose() * &ops[0] * &q));
                let max_abs = nus.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
                if nus.iter().any(|x| x.abs() < ZERO_CHILD_TOL) {
                    let cshift = 1.0 + 2.0 * max_abs;
                    self.shifts.push(ShiftEvent { level, parent, shift: cshift });
                    let mut shifted = ops.clone();
                    shifted[0] += (RMat::identity(d, d) - &pr[0]) * cshift;
                    for n in 1..=kl {
                        shifted[n] -= &pr[n] * cshift;
                    }
                    (shifted, cshift)
                } else {
                    (ops, 0.0)
                }
            }
        };
        let sd = eigendecompose_matrix(&ops[0], self.tol);
        let basis = Eigenbasis::from_symmetric(&sd);
        let terms: Vec<CMat> = ops[1..].iter().map(|m| m.map(c)).collect();
        let mut ids = Vec::new();
        for h in 0..sd.distinct_count() {
            let mult = sd.multiplicities[h];
            if let Some(pr) = &range {
                let inside = (&sd.projections[h] * &pr[0]).trace();
                if (inside - mult as f64).abs() > 1e-6 {
                    if inside.abs() > 1e-6 {
                        return Err(Error::Ambiguous(format!(
                            "level-{level} eigenvalue {} straddles the reduced range",
                            sd.eigenvalues[h]
                        )));
                    }
                    continue;
                }
            }
            let mut ex = ClusterExpansion::new(&basis, h, &terms);
            let projection: Vec<RMat> = ex.projection_series().iter().map(real_part).collect();
            let id = self.nodes.len();
            self.nodes.push(TreeNode {
                level,
                value: sd.eigenvalues[h],
                multiplicity: mult,
                parent,
                children: Vec::new(),
                operator: ops.clone(),
                projection: projection.clone(),
                reduced_resolvent: sd.reduced_resolvents[h].clone(),
                isolation: sd.isolation[h],
                shift,
                own_series: None,
                kind: NodeKind::Internal,
            });
            ids.push(id);
            if mult == 1 {
                let s = ex.eigenvalue_series().iter().map(|z| z.re).collect();
                self.nodes[id].own_series = Some(RealSeries::new(s));
                self.nodes[id].kind = NodeKind::SimpleLeaf;
            } else if kl == 0 || level + 1 > self.depth_cap {
                let s = ex.eigenvalue_series_by_trace().iter().map(|z| z.re).collect();
                self.nodes[id].own_series = Some(RealSeries::new(s));
                self.nodes[id].kind = NodeKind::UnresolvedLeaf;
            } else {
                let child_ops: Vec<RMat> = ex.reduced_series().iter().map(real_part).collect();
                let child_range: Vec<RMat> = projection[..kl].to_vec();
                let children = self.expand_level(child_ops, Some(child_range), level + 1, Some(id))?;
                self.nodes[id].children = children;
            }
        }
        Ok(ids)
    }
}

/// Algorithm-1 reduction: eigenvalue series for every eigenvalue of `T(χ)`.
pub fn reduction_tree(spec: &SpectralData, ts: &RealSeriesMatrix, k: usize) -> Result<EigenvalueTree> {
    let n = spec.n();
    let ops: Vec<RMat> = (0..=k)
        .map(|l| ts.coeffs.get(l).cloned().unwrap_or_else(|| RMat::zeros(n, n)))
        .collect();
    let mut b = Builder { nodes: Vec::new(), shifts: Vec::new(), tol: spec.cluster_tol, depth_cap: n };
    let roots = b.expand_level(ops, None, 0, None)?;
    let mut tree = EigenvalueTree { order: k, nodes: b.nodes, roots, leaves: Vec::new(), shifts: b.shifts };
    tree.assemble_leaves();
    Ok(tree)
}

impl EigenvalueTree {
    fn assemble_leaves(&mut self) {
        let mut leaves = Vec::new();
        for (id, node) in self.nodes.iter().enumerate() {
            let Some(own) = &node.own_series else { continue };
            let mut s = own.clone();
            let mut cur = id;
            while let Some(p) = self.nodes[cur].parent {
                let mut coeffs = vec![self.nodes[p].value];
                coeffs.extend(s.coeffs.iter().copied());
                s = RealSeries::new(coeffs);
                cur = p;
            }
            let root = self.roots.iter().position(|&r| r == cur).expect("leaf reaches a root");
            leaves.push(Leaf {
                node: id,
                root,
                multiplicity: if node.kind == NodeKind::SimpleLeaf { 1 } else { node.multiplicity },
                resolved: node.kind == NodeKind::SimpleLeaf,
                series: s.truncate(self.order),
            });
        }
        self.leaves = leaves;
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.level).max().unwrap_or(0)
    }

    pub fn leaves_of(&self, root: usize) -> impl Iterator<Item = &Leaf> {
        self.leaves.iter().filter(move |l| l.root == root)
    }

    /// Level at which the eigenvalue of root `h` first splits, if it does.
    pub fn split_level(&self, h: usize) -> Option<usize> {
        let mut cur = self.roots[h];
        loop {
            let node = &self.nodes[cur];
            match node.children.len() {
                0 => return None,
                1 => cur = node.children[0],
                _ => return Some(node.level + 1),
            }
        }
    }

    /// Leaf multiplicities below `id`.
    pub fn leaf_multiplicity(&self, id: usize) -> usize {
        let node = &self.nodes[id];
        match node.kind {
            NodeKind::SimpleLeaf => 1,
            NodeKind::UnresolvedLeaf => node.multiplicity,
            NodeKind::Internal => node.children.iter().map(|&c| self.leaf_multiplicity(c)).sum(),
        }
    }

    /// All eigenvalue series of `T(χ)`, one per eigenvalue counted with
    /// multiplicity.
    pub fn eigenvalue_series(&self) -> Vec<RealSeries> {
        let mut out = Vec::new();
        for leaf in &self.leaves {
            for _ in 0..leaf.multiplicity {
                out.push(leaf.series.clone());
            }
        }
        out
    }

    /// True when every leaf under root `h` carries the same series to
    /// `tol`, i.e. the eigenvalue does not split through the tree order.
    pub fn is_coherent(&self, h: usize, tol: f64) -> bool {
        let leaves: Vec<&Leaf> = self.leaves_of(h).collect();
        leaves.windows(2).all(|w| {
            w[0].series.coeffs.iter().zip(&w[1].series.coeffs).all(|(a, b)| (a - b).abs() <= tol)
        })
    }
}
