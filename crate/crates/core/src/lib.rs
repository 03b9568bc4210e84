//! Classical and Szegedy-walk quantum PageRank, with analytic perturbation
//! series for the quantum PageRank under `G(χ) = G + Σ χ^l G^(l)`.
//!
//! Pipeline: [`graph`] builds `G`, [`spectral`] decomposes the symmetric core
//! `T`, [`szegedy`] builds the walk `U` and evaluates `I_q`, [`perturbation`]
//! expands every quantity in χ, and [`oracle`] recomputes the same quantities
//! by brute force for cross-checking.

pub mod acceptance;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod linalg;
pub mod oracle;
pub mod perturbation;
pub mod series;
pub mod spectral;
pub mod szegedy;

pub use error::{Error, Result};
