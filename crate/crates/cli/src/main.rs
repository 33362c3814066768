//! `popmatch`: popular and robust popular matchings from the command line.
//!
//! Exit codes: 0 when a matching is found (or the matching is popular), 2
//! when none exists (or the matching is not popular), 1 on usage or input
//! errors.

mod batch;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use popmatch::{Model, DEFAULT_CAP};

#[derive(Debug, Parser)]
#[command(name = "popmatch", version, about = "Popular and robust popular matchings")]
struct Cli {
    /// Largest instance, in total vertices, given to brute-force searches.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find a popular matching (a k-unpopular stable one for two-sided ties).
    Solve { instance: PathBuf },
    /// Decide whether a matching is popular.
    Verify {
        instance: PathBuf,
        matching: PathBuf,
        /// Compare against every matching instead of the polynomial verifier.
        #[arg(long)]
        oracle: bool,
    },
    /// Find a matching popular in every given instance.
    Robust {
        first: PathBuf,
        second: PathBuf,
        /// Further instances perturbing the same agent.
        #[arg(long, num_args = 1..)]
        multi: Vec<PathBuf>,
    },
    /// Run the stable-k algorithm on a two-sided ties instance.
    Stablek {
        instance: PathBuf,
        /// Also compute the unpopularity factor by brute force.
        #[arg(long)]
        factor: bool,
    },
    /// Compute the unpopularity factor of a matching by brute force.
    Unpopularity { instance: PathBuf, matching: PathBuf },
    /// Print the hybrid instance of a perturbed pair for one edge.
    Hybrid {
        first: PathBuf,
        second: PathBuf,
        /// The edge as `agent:job`.
        #[arg(long)]
        edge: String,
    },
    /// Generate a random instance.
    Gen(GenArgs),
    /// Run random trials and write one CSV row per trial.
    Batch(batch::BatchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    OneSided,
    TwoSidedOneTie,
    TwoSidedTies,
}

impl ModelArg {
    /// The model with tie bound `tie_max`, which only two-sided ties accepts.
    fn resolve(self, tie_max: Option<usize>) -> Result<Model, commands::Failure> {
        match (self, tie_max) {
            (ModelArg::TwoSidedTies, k) => Ok(Model::TwoSidedTies { k: k.unwrap_or(2) }),
            (_, None | Some(1)) => Ok(match self {
                ModelArg::OneSided => Model::OneSided,
                _ => Model::TwoSidedOneTie,
            }),
            (_, Some(t)) => Err(commands::Failure::Usage(format!(
                "--tie-max {t} requires --model two-sided-ties"
            ))),
        }
    }
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long)]
    agents: usize,
    /// Defaults to the number of agents.
    #[arg(long)]
    jobs: Option<usize>,
    /// Probability of each agent-job edge.
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Largest tie, which is also k for two-sided ties (default 2).
    #[arg(long)]
    tie_max: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cap = cli.cap;
    let result = match cli.command {
        Command::Solve { instance } => commands::solve(&instance, cap),
        Command::Verify {
            instance,
            matching,
            oracle,
        } => commands::verify(&instance, &matching, oracle.then_some(cap)),
        Command::Robust { first, second, multi } => commands::robust(&first, &second, &multi, cap),
        Command::Stablek { instance, factor } => commands::stablek(&instance, factor, cap),
        Command::Unpopularity { instance, matching } => commands::unpopularity(&instance, &matching, cap),
        Command::Hybrid { first, second, edge } => commands::hybrid(&first, &second, &edge),
        Command::Gen(args) => args
            .model
            .resolve(args.tie_max)
            .and_then(|model| commands::gen(model, &args)),
        Command::Batch(args) => batch::run(&args, cap),
    };
    match result {
        Ok(commands::Outcome::Found) => ExitCode::SUCCESS,
        Ok(commands::Outcome::None) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
