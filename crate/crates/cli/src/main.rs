use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hcm::HcmError;

mod commands;
mod source;

use source::MixtureArgs;

/// Hierarchical configuration model: synthesis, analysis and percolation.
#[derive(Debug, Parser)]
#[command(name = "hcm", version)]
struct Cli {
    /// Worker threads for replicates and spectra (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Seed for all randomness.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Realize a graph and write its edge list.
    Generate {
        #[command(flatten)]
        mixture: MixtureArgs,
        /// Number of communities.
        #[arg(short, long)]
        n: usize,
        /// Edge-list output (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Summary JSON output (default: stderr when the edge list goes to
        /// stdout, else stdout).
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Rematch until the graph is simple.
        #[arg(long)]
        simple: bool,
    },
    /// Metrics of an edge list: degrees, components, clustering, tails.
    Analyze {
        edges: PathBuf,
        /// Metrics JSON output (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Directory for degree, component, clustering and tail CSVs.
        #[arg(long)]
        csv_dir: Option<PathBuf>,
    },
    /// Critical retention probability.
    Threshold {
        #[command(flatten)]
        mixture: MixtureArgs,
        #[command(flatten)]
        spectra: commands::SpectrumArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Giant component size, analytic and optionally simulated.
    Giant {
        #[command(flatten)]
        mixture: MixtureArgs,
        /// Retention probability; omit for the unpercolated graph.
        #[arg(long)]
        pi: Option<f64>,
        #[command(flatten)]
        spectra: commands::SpectrumArgs,
        #[command(flatten)]
        mc: commands::McArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Giant size across a grid of retention probabilities, or the critical
    /// point across a grid of one family parameter.
    Sweep {
        #[command(flatten)]
        mixture: MixtureArgs,
        /// Retention grid, `start:stop:count` or `a,b,c`.
        #[arg(long, default_value = "0:1:21", conflicts_with = "vary")]
        pi: String,
        /// Family parameter grid, `key=start:stop:count` or `key=a,b,c`.
        #[arg(long)]
        vary: Option<String>,
        #[command(flatten)]
        spectra: commands::SpectrumArgs,
        #[command(flatten)]
        mc: commands::McArgs,
        /// CSV output (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print a family as a mixture spec, or list the families.
    Catalog {
        family: Option<String>,
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Plain-edge and triangle random graph.
    #[command(name = "newman")]
    TriangleModel {
        /// Plain-edge degree pmf, `k:p,k:p`.
        #[arg(long)]
        edge_pmf: String,
        /// Triangle degree pmf, `k:p,k:p`.
        #[arg(long)]
        tri_pmf: String,
        /// Number of vertices.
        #[arg(short, long)]
        n: usize,
        #[arg(long)]
        simple: bool,
        /// Edge-list output; omitted means only the summary is written.
        #[arg(long)]
        edges: Option<PathBuf>,
        /// Summary JSON output (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<HcmError>()) {
        Some(e) if e.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
        {
            eprintln!("hcm: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(cli.command, cli.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("hcm: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
