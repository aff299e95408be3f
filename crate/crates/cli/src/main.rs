mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::{emit, CliError};

#[derive(Debug, Parser)]
#[command(name = "nielsen-lab", version, about = "Nielsen moves, invariants and normal forms on tuples in finite groups")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// State cap for orbit searches.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub cap: u64,
    /// Largest group order for which the subgroup lattice is built.
    #[arg(long = "max-order", global = true, default_value_t = nielsen_lab::lattice::DEFAULT_MAX_ORDER)]
    pub max_order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Epi,
    Abelian,
    Exseq,
    Jordan,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank, incompressibility and chain-length invariants.
    Invariants {
        #[arg(long)]
        group: String,
        /// Skip the search for the largest incompressible set.
        #[arg(long, value_parser = ["ic_tilde"])]
        skip: Option<String>,
        /// Node budget for the incompressible-set searches.
        #[arg(long, default_value_t = nielsen_lab::invariants::DEFAULT_SEARCH_BUDGET)]
        budget: u64,
    },
    /// Subgroups, covering pairs and conjugacy classes.
    Lattice {
        #[arg(long)]
        group: String,
        /// Ceiling on the number of subgroups.
        #[arg(long, default_value_t = nielsen_lab::lattice::DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Partition of all n-tuples into Nielsen orbits.
    Orbits {
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: usize,
    },
    /// Whether a tuple can be moved so its last k entries are trivial.
    Redundant {
        #[arg(long)]
        group: String,
        #[arg(long)]
        tuple: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Constructive normal form with a replayable witness.
    Normalize {
        #[arg(long)]
        group: String,
        #[arg(long)]
        tuple: String,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Replays a witness and checks that the image never changes.
    VerifyWitness {
        #[arg(long)]
        group: String,
        /// Source tuple; defaults to the `source` recorded in the file.
        #[arg(long)]
        tuple: Option<String>,
        /// A move list, or a report from `normalize` or `redundant`.
        #[arg(long)]
        witness: std::path::PathBuf,
    },
    /// Explicit rank and redundancy constants for dimension m.
    Constants {
        #[arg(long)]
        m: u32,
        /// JSON object mapping m to a value of J(m).
        #[arg(long)]
        jordan: Option<std::path::PathBuf>,
        #[arg(long, default_value_t = 1000)]
        b: u64,
    },
    /// Symplectic matrix sending a primitive vector of Z^{2g} to u_1.
    SpReduce {
        #[arg(long)]
        g: usize,
        /// 2g comma-separated integers.
        #[arg(long, allow_hyphen_values = true)]
        w: String,
    },
    /// Symplectic matrix zeroing the last hyperbolic pair of v in A^{2g}.
    Stabilize {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        moduli: String,
        /// 2g·r residues, row by row; rows may be separated by `;`.
        #[arg(long)]
        v: String,
    },
    /// Lazy product-replacement walk and its distance to uniform.
    Walk {
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: usize,
        /// Accepts forms like `1e6`.
        #[arg(long, default_value = "1e6")]
        steps: String,
        #[arg(long)]
        burn_in: Option<u64>,
        #[arg(long, default_value_t = 0.5)]
        laziness: f64,
        #[arg(long, default_value_t = 1)]
        chains: u32,
        /// Start tuple; defaults to a minimal generating set padded with 1.
        #[arg(long)]
        start: Option<String>,
        /// Leave per-tuple counts out of the report.
        #[arg(long)]
        no_counts: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Invariants { .. } => "invariants",
            Command::Lattice { .. } => "lattice",
            Command::Orbits { .. } => "orbits",
            Command::Redundant { .. } => "redundant",
            Command::Normalize { .. } => "normalize",
            Command::VerifyWitness { .. } => "verify-witness",
            Command::Constants { .. } => "constants",
            Command::SpReduce { .. } => "sp-reduce",
            Command::Stabilize { .. } => "stabilize",
            Command::Walk { .. } => "walk",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let name = cli.command.name();
    match commands::run(&cli) {
        Ok(out) => {
            emit(name, &cli.global, &out.report, out.code);
            ExitCode::from(out.code)
        }
        Err(CliError { code, message, partial }) => {
            eprintln!("error: {message}");
            if let Some(p) = partial {
                emit(name, &cli.global, &p, code);
            }
            ExitCode::from(code)
        }
    }
}
