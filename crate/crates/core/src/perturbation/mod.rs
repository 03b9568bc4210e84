//! Power-series expansions of every quantity in χ.

pub mod coeffs;
pub mod kato;

pub use coeffs::{b_series, psi_series, sqrt_series, t_series, u_series};
pub use kato::{ClusterExpansion, Eigenbasis};
pub mod tree;

pub use tree::{eigenvalue_series_simple, projection_series, reduction_tree, EigenvalueTree, Leaf, NodeKind, TreeNode};
pub mod walk;

pub use walk::{
    a1_series, eigvec_series, iq_series, iq_series_complex, mu_series, q_series, u_projection_series, v_series,
    Route, UCluster, UnitarySpectrum, WalkExpansion,
};
pub mod bounds;

pub use bounds::{error_bounds, BoundLedger, EntryRadius, Envelope, LeafBound, LevelBound, RadiusEstimate};
