//! `qpagerank`: classical and quantum PageRank, perturbation series and the
//! acceptance suite from the command line.
//!
//! Exit codes: 0 ok, 1 other failure (including a failed `validate`), 2 parse
//! or input error, 3 power iteration did not converge, 4 walk too large,
//! 5 inadmissible perturbation, 6 inadmissible χ.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qpagerank::szegedy::{Variant, DEFAULT_DIM_CAP};

use commands::{GraphArgs, Psi0, WalkArgs};
use report::{Format, Report};

#[derive(Parser)]
#[command(name = "qpagerank", version, about = "Classical and Szegedy-walk quantum PageRank with perturbation series")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphOpts {
    /// Edge list: `src<TAB>dst` per line, 1-based, optional `nodes: N` header.
    #[arg(long)]
    graph: PathBuf,
    /// Damping factor.
    #[arg(long, default_value_t = 0.85)]
    alpha: f64,
}

impl From<&GraphOpts> for GraphArgs {
    fn from(o: &GraphOpts) -> Self {
        GraphArgs { path: o.graph.clone(), alpha: o.alpha }
    }
}

#[derive(Args)]
struct WalkOpts {
    /// Walk times m (comma separated).
    #[arg(long = "m", value_delimiter = ',', default_values_t = [1u64])]
    ms: Vec<u64>,
    /// Restrict output to these nodes (comma separated, 1-based).
    #[arg(long, value_delimiter = ',')]
    nodes: Option<Vec<usize>>,
    /// Initial state: `uniform` or a JSON file of amplitudes.
    #[arg(long, default_value = "uniform")]
    psi0: Psi0,
    /// `coherent` (sum inside the modulus) or `norm` (norm over the first register).
    #[arg(long, default_value = "coherent")]
    variant: Variant,
    /// Largest walk dimension N² accepted.
    #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
    dim_cap: usize,
}

impl From<&WalkOpts> for WalkArgs {
    fn from(o: &WalkOpts) -> Self {
        WalkArgs { ms: o.ms.clone(), nodes: o.nodes.clone(), psi0: o.psi0.clone(), variant: o.variant, dim_cap: o.dim_cap }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classical PageRank by power iteration, ranked by score.
    RankClassical {
        #[command(flatten)]
        graph: GraphOpts,
        /// ℓ¹ residual at which iteration stops.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Quantum PageRank I_q(i, m), its time average, limit and mixing bound.
    RankQuantum {
        #[command(flatten)]
        graph: GraphOpts,
        #[command(flatten)]
        walk: WalkOpts,
    },
    /// Series coefficients, radii, bounds and oracle comparison for a perturbation.
    Perturb {
        #[command(flatten)]
        graph: GraphOpts,
        #[command(flatten)]
        walk: WalkOpts,
        /// Perturbation file (JSON with `order_terms`, optional `A0`, `B0`).
        #[arg(long)]
        perturbation: PathBuf,
        /// Truncation order K.
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// χ values for the oracle comparison; defaults to a dyadic grid within 0.3·r0.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        chi: Option<Vec<f64>>,
    },
    /// Runs the acceptance suite on the bundled fixtures.
    Validate {
        /// Seed for the randomized criteria.
        #[arg(long, default_value_t = qpagerank::acceptance::SEED)]
        seed: u64,
    },
}

fn emit(report: &Report, format: Format, out: &Option<PathBuf>) -> Result<(), String> {
    let text = report.render(format);
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, passed) = match &cli.command {
        Command::RankClassical { graph, tol, max_iter } => (commands::rank_classical(&graph.into(), *tol, *max_iter), true),
        Command::RankQuantum { graph, walk } => (commands::rank_quantum(&graph.into(), &walk.into()), true),
        Command::Perturb { graph, walk, perturbation, order, chi } => {
            (commands::perturb(&graph.into(), &walk.into(), perturbation, *order, chi), true)
        }
        Command::Validate { seed } => {
            let (report, ok) = commands::validate(*seed);
            (Ok(report), ok)
        }
    };
    match result {
        Ok(report) => {
            if let Err(msg) = emit(&report, cli.format, &cli.out) {
                eprintln!("error: {msg}");
                return ExitCode::from(1);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: acceptance criteria failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
