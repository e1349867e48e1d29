//! `median-lab`: median graphs, group models, cocycles and presentations from the shell.
//!
//! Exit codes: 0 success, 1 analysis-negative result, 2 usage or input error,
//! 3 resource cap exceeded.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "median-lab", version, about = "Median graphs, central extensions and explicit groups")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the artifact into this directory instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Element or vertex cap; defaults to MEDIAN_LAB_CAP or the built-in cap.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate and analyse finite graphs.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Cayley balls, distortion profiles and element orders.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Cocycle checks, Euler cocycle values, defects and translation numbers.
    #[command(subcommand)]
    Cocycle(CocycleCmd),
    /// Presentations: relator checks, hom counts, separation.
    #[command(subcommand)]
    Present(PresentCmd),
    /// Flatten JSON reports into one CSV table.
    Report(ReportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Hypercube,
    Grid,
    Path,
    Cycle,
    Tree,
    Random,
    Quasiline,
    Complete,
}

#[derive(Subcommand)]
pub enum GraphCmd {
    /// Emit a generated graph (JSON, edge list via --format csv, or DOT).
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Hypercube dimension.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        /// Vertex count for path, cycle, tree, random and complete graphs.
        #[arg(long)]
        n: Option<usize>,
        /// Extra random chords for `random`.
        #[arg(long, default_value_t = 0)]
        extra: usize,
        #[arg(long)]
        lambda: Option<u32>,
        #[arg(long)]
        lo: Option<i64>,
        #[arg(long)]
        hi: Option<i64>,
    },
    /// Median certification and the almost-median frontier.
    Analyze {
        /// Graph file (JSON, edge list or DOT); stdin when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Run the median check (default when no analysis is selected).
        #[arg(long)]
        median: bool,
        /// Compute the (δ, Δ) frontier up to --delta-max.
        #[arg(long)]
        frontier: bool,
        #[arg(long, default_value_t = 3)]
        delta_max: u32,
        /// Exit 1 when the graph is not median (`median`) or is median (`not-median`).
        #[arg(long)]
        expect: Option<Expectation>,
    },
    /// Hyperplanes and cubical dimension of a median graph.
    Hyperplanes {
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expectation {
    Median,
    NotMedian,
}

#[derive(Subcommand)]
pub enum GroupCmd {
    /// Exact Cayley ball (summary JSON, sphere sizes as CSV, or DOT).
    Ball {
        #[arg(long)]
        model: String,
        #[arg(long)]
        radius: u32,
    },
    /// Word lengths of central powers found in a ball.
    Distortion {
        #[arg(long)]
        model: String,
        #[arg(long)]
        radius: u32,
        /// Central element as a word; defaults to the model's center generator.
        #[arg(long)]
        central: Option<String>,
    },
    /// Order of an element, searched up to --bound.
    Order {
        #[arg(long)]
        model: String,
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 64)]
        bound: u64,
    },
}

#[derive(Args, Clone)]
pub struct SamplingArgs {
    /// Seeded random samples instead of the default sampling.
    #[arg(long, conflicts_with = "radius")]
    pub samples: Option<usize>,
    /// Exhaustive sampling on the Cayley ball of this radius.
    #[arg(long)]
    pub radius: Option<u32>,
    /// Maximum word length of random samples.
    #[arg(long, default_value_t = 6)]
    pub max_len: usize,
}

#[derive(Subcommand)]
pub enum CocycleCmd {
    /// Check the cocycle identity and normalisation; exit 1 on failure.
    Check {
        #[arg(long)]
        name: String,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Add 1 to the value at (first generator, first generator).
        #[arg(long)]
        perturb: bool,
    },
    /// Euler cocycle value c(g, h) for circle maps given as words.
    Euler {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Defect of the central coordinate against max |c|.
    Defect {
        #[arg(long)]
        name: String,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Translation number estimate of (z, q).
    Translation {
        #[arg(long)]
        name: String,
        /// Base part as a word (for euler:T, named maps such as r_half).
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        z: i64,
        #[arg(long, default_value_t = 64)]
        n: u64,
    },
}

#[derive(Subcommand)]
pub enum PresentCmd {
    /// Evaluate every relator in a model.
    Check {
        /// Presentation name or text; `@path` reads a file.
        #[arg(long)]
        p: String,
        #[arg(long)]
        model: String,
        /// `gen=word` pairs; generators default to model generators of the same name.
        #[arg(long)]
        assign: Option<String>,
        #[arg(long, default_value_t = 20)]
        n_bound: i64,
    },
    /// Exact hom counts into finite targets.
    Homcount {
        #[arg(long)]
        p: String,
        /// Comma-separated targets, e.g. `Z2,S3,Q8` or `small:16`.
        #[arg(long)]
        targets: String,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u128,
    },
    /// Compare hom counts target by target.
    Separate {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        targets: String,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u128,
    },
}

#[derive(Args)]
pub struct ReportArgs {
    /// JSON reports to bundle.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.global.workers {
        if w == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(help) = e.grammar() {
                eprintln!("{help}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
