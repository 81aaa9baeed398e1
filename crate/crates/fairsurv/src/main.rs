use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fairsurv::commands::{
    run_benchmark, run_evaluate, run_landscape, run_synth, run_train, set_jobs, EvaluateArgs,
};
use fairsurv::dataset::SplitSpec;

#[derive(Parser)]
#[command(name = "fairsurv", about = "Fair survival analysis at pre-defined time points")]
struct Cli {
    /// worker threads (default: FAIRSURV_JOBS or all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic censored dataset from a JSON generator spec
    Synth {
        /// generator spec (JSON)
        #[arg(long)]
        config: PathBuf,
        /// output CSV path (schema sidecar written next to it)
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a model from a JSON run config
    Train {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a checkpoint on the test split of a dataset
    Evaluate(EvalCli),
    /// Run a benchmark sweep from a JSON plan
    Benchmark {
        #[arg(long)]
        config: PathBuf,
    },
    /// Emit loss-landscape grids for two linear coefficients
    Landscape {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct EvalCli {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    /// schema sidecar (default: <dataset>.schema.json)
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// split seed used when the checkpoint was trained
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// train/val/test ratios
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.8, 0.1, 0.1])]
    ratios: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    set_jobs(cli.jobs);
    let result = match cli.command {
        Command::Synth { config, out } => run_synth(&config, &out),
        Command::Train { config } => run_train(&config),
        Command::Evaluate(args) => run_evaluate(&EvaluateArgs {
            checkpoint: args.checkpoint,
            dataset: args.dataset,
            schema: args.schema,
            out_dir: args.out,
            split: SplitSpec {
                ratios: [args.ratios[0], args.ratios[1], args.ratios[2]],
                seed: args.seed,
            },
        }),
        Command::Benchmark { config } => run_benchmark(&config),
        Command::Landscape { config } => run_landscape(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
