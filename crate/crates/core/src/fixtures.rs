//! Small graphs and perturbations bundled with the crate, used by the tests,
//! the acceptance suite and `qpagerank validate`.

use crate::error::Result;
use crate::graph::{build_google, load_edge_list, DirectedGraph, GoogleMatrix, MatrixSeries, PerturbationSpec};

pub const ALPHA: f64 = 0.85;

pub struct Fixture {
    pub name: &'static str,
    pub edges: &'static str,
    pub perturbation: &'static str,
}

pub const TWO_CYCLE: Fixture = Fixture {
    name: "two_cycle",
    edges: include_str!("../fixtures/two_cycle.tsv"),
    perturbation: include_str!("../fixtures/two_cycle_g1.json"),
};

pub const DANGLING_CHAIN: Fixture = Fixture {
    name: "dangling_chain",
    edges: include_str!("../fixtures/dangling_chain.tsv"),
    perturbation: include_str!("../fixtures/dangling_chain_pert.json"),
};

/// `T` has a doubly degenerate eigenvalue; the first-order term splits it.
pub const K3_BREAKING: Fixture = Fixture {
    name: "k3_breaking",
    edges: include_str!("../fixtures/k3.tsv"),
    perturbation: include_str!("../fixtures/k3_breaking.json"),
};

/// Antisymmetric first-order term: `T^(1) = 0`, the split happens at order 2.
pub const K3_PRESERVING: Fixture = Fixture {
    name: "k3_preserving",
    edges: include_str!("../fixtures/k3.tsv"),
    perturbation: include_str!("../fixtures/k3_preserving.json"),
};

pub const FOUR_NODE: Fixture = Fixture {
    name: "four_node",
    edges: include_str!("../fixtures/four_node.tsv"),
    perturbation: include_str!("../fixtures/four_node_pert.json"),
};

pub const ZERO_PERTURBATION: &str = include_str!("../fixtures/zero.json");

pub const ALL: [Fixture; 5] = [TWO_CYCLE, DANGLING_CHAIN, K3_BREAKING, K3_PRESERVING, FOUR_NODE];

impl Fixture {
    pub fn graph(&self) -> Result<DirectedGraph> {
        load_edge_list(self.edges)
    }

    pub fn google(&self) -> Result<GoogleMatrix> {
        build_google(&self.graph()?, ALPHA, None)
    }

    pub fn series(&self) -> Result<MatrixSeries> {
        PerturbationSpec::from_json(self.perturbation)?.to_series(&self.google()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_load() {
        for f in ALL {
            let gs = f.series().unwrap();
            assert!(!gs.is_zero(), "{}", f.name);
            // G(χ) stays stochastic with positive entries at χ = 0.1.
            let g = gs.evaluate(0.1);
            assert!(g.iter().all(|&x| x > 0.0), "{}", f.name);
        }
    }
}
