use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qpagerank::acceptance;
use qpagerank::graph::{build_google, classical_pagerank, load_edge_list, GoogleMatrix, MatrixSeries, PerturbationSpec};
use qpagerank::linalg::CVec;
use qpagerank::oracle::{admissible_g, compare_truncation, dyadic_grid, evaluate_at, OracleContext};
use qpagerank::perturbation::{error_bounds, WalkExpansion};
use qpagerank::spectral::{build_t, eigendecompose, DEFAULT_CLUSTER_TOL};
use qpagerank::szegedy::{
    average_pagerank, build_walk_capped, he_eigenpairs, limit_pagerank, mixing_bound, quantum_pagerank, uniform_state,
    SzegedyOperators, Variant,
};
use qpagerank::{Error, Result};

use crate::report::{Cell, Report, Table};

/// Initial state: `uniform` or a JSON file of `N²` amplitudes, each a real
/// number or a `[re, im]` pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Psi0 {
    Uniform,
    File(PathBuf),
}

impl std::str::FromStr for Psi0 {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(if s == "uniform" { Psi0::Uniform } else { Psi0::File(PathBuf::from(s)) })
    }
}

pub struct GraphArgs {
    pub path: PathBuf,
    pub alpha: f64,
}

pub struct WalkArgs {
    pub ms: Vec<u64>,
    pub nodes: Option<Vec<usize>>,
    pub psi0: Psi0,
    pub variant: Variant,
    pub dim_cap: usize,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_google(args: &GraphArgs) -> Result<GoogleMatrix> {
    let text = read(&args.path)?;
    let graph = load_edge_list(&text).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse { line, msg: format!("{}: {msg}", args.path.display()) },
        other => other,
    })?;
    build_google(&graph, args.alpha, None)
}

fn node_list(nodes: &Option<Vec<usize>>, n: usize) -> Result<Vec<usize>> {
    match nodes {
        None => Ok((1..=n).collect()),
        Some(list) => {
            if let Some(&bad) = list.iter().find(|&&i| i == 0 || i > n) {
                return Err(Error::Invalid(format!("node {bad} outside 1..={n}")));
            }
            Ok(list.clone())
        }
    }
}

fn load_state(choice: &Psi0, ops: &SzegedyOperators) -> Result<CVec> {
    let path = match choice {
        Psi0::Uniform => return Ok(uniform_state(ops)),
        Psi0::File(p) => p,
    };
    let value: serde_json::Value = serde_json::from_str(&read(path)?)
        .map_err(|e| Error::Parse { line: e.line(), msg: format!("{}: {e}", path.display()) })?;
    let bad = |msg: &str| Error::Invalid(format!("{}: {msg}", path.display()));
    let items = value.as_array().ok_or_else(|| bad("expected a JSON array of amplitudes"))?;
    let amps = items
        .iter()
        .map(|v| match v {
            serde_json::Value::Number(x) => x.as_f64().map(|re| Complex64::new(re, 0.0)),
            serde_json::Value::Array(p) if p.len() == 2 => Some(Complex64::new(p[0].as_f64()?, p[1].as_f64()?)),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| bad("amplitudes must be numbers or [re, im] pairs"))?;
    Ok(CVec::from_vec(amps))
}

pub fn rank_classical(graph: &GraphArgs, tol: f64, max_iter: usize) -> Result<Report> {
    let g = load_google(graph)?;
    let pr = classical_pagerank(&g, tol, max_iter)?;
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by(|&a, &b| pr[b].total_cmp(&pr[a]).then(a.cmp(&b)));
    let mut table = Table::new("pagerank", &["rank", "node", "score"]);
    for (r, &k) in order.iter().enumerate() {
        table.push(vec![(r + 1).into(), (k + 1).into(), pr[k].into()]);
    }
    Ok(Report { tables: vec![table] })
}

/// Rows per `(node, m)`: `I_q`, the time average `Ī_q(t = m)`, its limit and
/// the mixing bound at `t = m` (the last two columns are empty for `m = 0`).
pub fn rank_quantum(graph: &GraphArgs, walk: &WalkArgs) -> Result<Report> {
    if walk.ms.is_empty() {
        return Err(Error::Invalid("the m list is empty".into()));
    }
    let g = load_google(graph)?;
    let ops = build_walk_capped(&g.entries, walk.dim_cap)?;
    let ws = he_eigenpairs(&ops, &eigendecompose(&build_t(&g), DEFAULT_CLUSTER_TOL))?;
    let psi0 = load_state(&walk.psi0, &ops)?;
    ws.check_state(&psi0)?;
    let nodes = node_list(&walk.nodes, g.n)?;
    let mut table = Table::new("quantum", &["node", "m", "iq", "average", "limit", "mixing_bound"]);
    for &i in &nodes {
        let limit = limit_pagerank(&ws, &psi0, i, walk.variant)?;
        for &m in &walk.ms {
            let iq = quantum_pagerank(&ws, &psi0, i, m, walk.variant)?;
            let (avg, bound) = if m == 0 {
                (None, None)
            } else {
                (Some(average_pagerank(&ws, &psi0, i, m, walk.variant)?), Some(mixing_bound(&ws, &psi0, m)?))
            };
            table.push(vec![i.into(), m.into(), iq.into(), avg.into(), limit.into(), bound.into()]);
        }
    }
    Ok(Report { tables: vec![table] })
}

fn load_series(path: &Path, g: &GoogleMatrix) -> Result<MatrixSeries> {
    let spec = PerturbationSpec::from_json(&read(path)?).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse { line, msg: format!("{}: {msg}", path.display()) },
        other => other,
    })?;
    spec.to_series(g)
}

/// Coefficients, radii, the bound ledger and the oracle comparison in one report.
pub fn perturb(graph: &GraphArgs, walk: &WalkArgs, perturbation: &Path, order: usize, chi: &Option<Vec<f64>>) -> Result<Report> {
    if !(1..=8).contains(&order) {
        return Err(Error::Invalid(format!("order must lie in 1..=8, got {order}")));
    }
    let g = load_google(graph)?;
    let ops = build_walk_capped(&g.entries, walk.dim_cap)?;
    let gs = load_series(perturbation, &g)?;
    let nodes = node_list(&walk.nodes, g.n)?;
    let psi0 = load_state(&walk.psi0, &ops)?;
    let ex = WalkExpansion::new(&gs, order, DEFAULT_CLUSTER_TOL)?;
    ex.walk.check_state(&psi0)?;
    let led = error_bounds(&gs, &ex)?;
    let rad = &led.radius;

    let grid = match chi {
        Some(list) => {
            for &x in list {
                admissible_g(&gs, x)?;
            }
            list.clone()
        }
        None => dyadic_grid(0.3 * rad.r0, 4),
    };

    let mut summary = Table::new(
        "summary",
        &["order", "n", "a0", "b0", "eps0", "r0", "r1", "r2", "varrho1", "tree_depth", "shifts"],
    );
    summary.push(vec![
        order.into(),
        g.n.into(),
        led.a0.into(),
        led.b0.into(),
        led.eps0.into(),
        rad.r0.into(),
        rad.r1.into(),
        rad.r2.into(),
        rad.varrho1.into(),
        ex.tree.depth().into(),
        ex.tree.shifts.len().into(),
    ]);

    let mut t_table = Table::new("t_series", &["i", "j", "order", "value"]);
    for l in 1..=order {
        for i in 0..g.n {
            for j in 0..g.n {
                t_table.push(vec![(i + 1).into(), (j + 1).into(), l.into(), ex.t_series.coeffs[l][(i, j)].into()]);
            }
        }
    }

    let mut eig = Table::new("eigenvalues", &["leaf", "lambda0", "multiplicity", "resolved", "order", "value"]);
    for (k, leaf) in ex.tree.leaves.iter().enumerate() {
        for (l, v) in leaf.series.coeffs.iter().enumerate() {
            eig.push(vec![
                k.into(),
                ex.spectral.eigenvalues[leaf.root].into(),
                leaf.multiplicity.into(),
                leaf.resolved.into(),
                l.into(),
                (*v).into(),
            ]);
        }
    }

    let variant_name = match walk.variant {
        Variant::Coherent => "coherent",
        Variant::Norm => "norm",
    };
    let mut iq = Table::new("iq_series", &["node", "m", "variant", "order", "value"]);
    let mut series = Vec::new();
    for &i in &nodes {
        for &m in &walk.ms {
            let s = ex.iq_series(&psi0, i, m, walk.variant)?;
            for (l, v) in s.coeffs.iter().enumerate() {
                iq.push(vec![i.into(), m.into(), variant_name.into(), l.into(), (*v).into()]);
            }
            series.push((i, m, s));
        }
    }

    let mut radii = Table::new("radii", &["kind", "index", "i", "j", "value"]);
    for e in &rad.entries {
        radii.push(vec!["entry_relative".into(), Cell::Null, e.i.into(), e.j.into(), e.relative.into()]);
        radii.push(vec!["entry_absolute".into(), Cell::Null, e.i.into(), e.j.into(), e.absolute.into()]);
    }
    for (h, r) in rad.r_h.iter().enumerate() {
        radii.push(vec!["r_h".into(), h.into(), Cell::Null, Cell::Null, (*r).into()]);
    }
    for lb in &rad.leaves {
        radii.push(vec!["leaf".into(), lb.leaf.into(), Cell::Null, Cell::Null, lb.radius.into()]);
    }
    for (kind, v) in [("r1", rad.r1), ("r2", rad.r2), ("r0", rad.r0)] {
        radii.push(vec![kind.into(), Cell::Null, Cell::Null, Cell::Null, v.into()]);
    }

    let mut bounds = Table::new("bounds", &["quantity", "index", "a", "b"]);
    let mut env = |q: &str, idx: Option<usize>, e: qpagerank::perturbation::Envelope| {
        bounds.push(vec![q.into(), idx.into(), e.a.into(), e.b.into()]);
    };
    env("psi", None, led.psi);
    env("U", None, led.u);
    env("T", None, led.t);
    for (h, e) in led.t_projection.iter().enumerate() {
        env("P_h", Some(h), *e);
    }
    for (h, e) in led.u_projection.iter().enumerate() {
        env("P_hat_h", Some(h), *e);
    }
    env("Q", None, led.q);
    env("V", None, led.v);
    for (h, e) in led.mu.iter().enumerate() {
        if let Some(e) = e {
            env("mu", Some(h), *e);
        }
    }
    for &m in &walk.ms {
        env("N_q", Some(m as usize), led.nq_envelope(m));
        env("I_q", Some(m as usize), led.iq_envelope(m));
    }
    for lb in &rad.leaves {
        env("lambda", Some(lb.leaf), qpagerank::perturbation::Envelope { a: lb.varrho / lb.radius, b: 1.0 / lb.radius });
    }

    let mut trunc = Table::new(
        "truncation",
        &["chi", "quantity", "oracle", "truncated", "abs_error", "tail_bound", "within_bound"],
    );
    if !grid.is_empty() {
        let ctx = OracleContext::new(&gs, DEFAULT_CLUSTER_TOL)?;
        let samples = grid
            .iter()
            .map(|&x| evaluate_at(&ctx, x, &psi0, &nodes, &walk.ms, walk.variant))
            .collect::<Result<Vec<_>>>()?;
        for (i, m, s) in &series {
            let oracle: Vec<(f64, f64)> = samples
                .iter()
                .map(|smp| {
                    let v = smp.iq.iter().find(|&&(a, b, _)| a == *i && b == *m).map(|t| t.2).expect("sampled");
                    (smp.chi, v)
                })
                .collect();
            let envelope = led.iq_envelope(*m);
            let report = compare_truncation(&format!("iq[i={i},m={m}]"), s, &oracle, |x| envelope.tail(order, x));
            for r in report.rows {
                trunc.push(vec![
                    r.chi.into(),
                    r.quantity.into(),
                    r.oracle.into(),
                    r.truncated.into(),
                    r.abs_error.into(),
                    r.tail_bound.into(),
                    r.within_bound.into(),
                ]);
            }
        }
    }

    Ok(Report { tables: vec![summary, t_table, eig, iq, radii, bounds, trunc] })
}

/// Runs the acceptance suite; the flag is false when any criterion fails.
pub fn validate(seed: u64) -> (Report, bool) {
    let results = acceptance::run_seeded(seed);
    let mut table = Table::new("acceptance", &["id", "criterion", "passed", "detail"]);
    for r in &results {
        table.push(vec![r.id.into(), r.name.into(), r.passed.into(), r.detail.clone().into()]);
    }
    let ok = results.iter().all(|r| r.passed);
    (Report { tables: vec![table] }, ok)
}
