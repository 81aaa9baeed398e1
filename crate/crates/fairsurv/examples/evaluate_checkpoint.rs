//! End-to-end file pipeline: synthesize a dataset to CSV, train from a run
//! config, and evaluate the saved checkpoint on the held-out test split —
//! the same three steps the `fairsurv synth` / `train` / `evaluate`
//! subcommands perform.
//!
//! Run with: `cargo run --release --example evaluate_checkpoint`

use std::fs;
use std::path::Path;

use fairsurv::commands::{run_evaluate, run_synth, run_train, EvaluateArgs};
use fairsurv::dataset::SplitSpec;

fn main() -> fairsurv::Result<()> {
    let dir = Path::new("target/example_pipeline");
    fs::create_dir_all(dir)?;

    let synth_spec = serde_json::json!({
        "n": 500,
        "p": 4,
        "n_groups": 2,
        "beta": [0.9, -0.6, 0.5, 0.3],
        "group_shift": [0.0, -0.5],
        "noise_scale": 0.4,
        "censor_rate_target": [0.25, 0.35],
        "bias_strength": 1.5,
        "seed": 3
    });
    let spec_path = dir.join("synth.json");
    fs::write(&spec_path, serde_json::to_string_pretty(&synth_spec)?)?;
    let csv_path = dir.join("data.csv");
    run_synth(&spec_path, &csv_path)?;

    let run_config = serde_json::json!({
        "dataset": csv_path,
        "out_dir": dir.join("run"),
        "split": { "ratios": [0.8, 0.1, 0.1], "seed": 3 },
        "train": {
            "scenario": "LinearAFT",
            "method": "CMIA",
            "epochs": 150,
            "lambda1": 50.0,
            "noise": { "m": 15, "tau": 1.0, "seed": 3 },
            "seed": 3
        }
    });
    let config_path = dir.join("run.json");
    fs::write(&config_path, serde_json::to_string_pretty(&run_config)?)?;
    run_train(&config_path)?;

    run_evaluate(&EvaluateArgs {
        checkpoint: dir.join("run/checkpoint.json"),
        dataset: csv_path,
        schema: None,
        out_dir: dir.join("eval"),
        split: SplitSpec { ratios: [0.8, 0.1, 0.1], seed: 3 },
    })?;

    println!("\n--- report.csv ---");
    print!("{}", fs::read_to_string(dir.join("eval/report.csv"))?);
    Ok(())
}
