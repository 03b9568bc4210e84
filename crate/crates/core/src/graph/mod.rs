//! Directed graphs, the Google matrix and its power-series perturbations.

mod google;
mod series;

pub use google::{build_google, classical_pagerank, GoogleMatrix};
pub use series::{MatrixSeries, PerturbationSpec, SpecEntry, SpecTerm};

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Directed graph on nodes `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    pub n: usize,
    /// Ordered (src, dst) pairs, 1-based.
    pub edges: BTreeSet<(usize, usize)>,
    pub out_degree: Vec<usize>,
    pub dangling: Vec<bool>,
}

impl DirectedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("graph has zero nodes".into()));
        }
        let mut set = BTreeSet::new();
        for (s, d) in edges {
            if s == 0 || d == 0 || s > n || d > n {
                return Err(Error::Invalid(format!("edge ({s}, {d}) outside 1..={n}")));
            }
            if !set.insert((s, d)) {
                return Err(Error::Invalid(format!("duplicate edge ({s}, {d})")));
            }
        }
        let mut out_degree = vec![0; n];
        for &(s, _) in &set {
            out_degree[s - 1] += 1;
        }
        let dangling = out_degree.iter().map(|&d| d == 0).collect();
        Ok(DirectedGraph { n, edges: set, out_degree, dangling })
    }
}

/// Parses a tab-separated edge list with `#` comments and an optional
/// leading `nodes: N` header.
pub fn load_edge_list(text: &str) -> Result<DirectedGraph> {
    let mut declared: Option<usize> = None;
    let mut seen_content = false;
    let mut edges = BTreeSet::new();
    let mut max_id = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("nodes:") {
            if seen_content || declared.is_some() {
                return Err(Error::Parse { line: line_no, msg: "header must precede edges".into() });
            }
            let n = rest.trim().parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad node count '{}'", rest.trim()),
            })?;
            declared = Some(n);
            continue;
        }
        seen_content = true;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse { line: line_no, msg: format!("expected 'src<TAB>dst', got '{line}'") });
        }
        let parse = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(v) if v > 0 => Ok(v),
                _ => Err(Error::Parse { line: line_no, msg: format!("bad node id '{s}'") }),
            }
        };
        let (src, dst) = (parse(fields[0])?, parse(fields[1])?);
        if !edges.insert((src, dst)) {
            return Err(Error::DuplicateEdge { line: line_no, src, dst });
        }
        max_id = max_id.max(src).max(dst);
    }
    let n = match declared {
        Some(n) if n < max_id => {
            return Err(Error::Invalid(format!("header declares {n} nodes but node {max_id} is referenced")));
        }
        Some(n) => n,
        None => max_id,
    };
    DirectedGraph::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_cycle() {
        let g = load_edge_list("1\t2\n2\t1").unwrap();
        assert_eq!(g.n, 2);
        assert_eq!(g.edges.len(), 2);
        assert_eq!(g.dangling, vec![false, false]);
    }

    #[test]
    fn marks_dangling() {
        let g = load_edge_list("1\t2").unwrap();
        assert_eq!(g.dangling, vec![false, true]);
    }

    #[test]
    fn rejects_duplicates_with_line() {
        match load_edge_list("1\t2\n1\t2") {
            Err(Error::DuplicateEdge { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_and_comments() {
        let g = load_edge_list("# toy\nnodes: 4\n1\t2\n# mid\n2\t1\n").unwrap();
        assert_eq!(g.n, 4);
        assert_eq!(g.dangling, vec![false, false, true, true]);
    }

    #[test]
    fn header_contradiction_and_empty() {
        assert!(load_edge_list("nodes: 1\n1\t2").is_err());
        assert!(load_edge_list("# nothing\n").is_err());
        assert!(matches!(load_edge_list("1\tx"), Err(Error::Parse { line: 1, .. })));
    }
}
