//! Run a small benchmark grid (dataset x scenario x method x seed) through
//! the same driver the `fairsurv benchmark` subcommand uses, then print the
//! aggregated results table.
//!
//! Run with: `cargo run --release --example benchmark_sweep`

use std::fs;
use std::path::Path;

use fairsurv::commands::run_benchmark;

fn main() -> fairsurv::Result<()> {
    let dir = Path::new("target/example_benchmark");
    fs::create_dir_all(dir)?;

    let plan = serde_json::json!({
        "datasets": [{
            "name": "synthetic",
            "synth": {
                "n": 300,
                "p": 4,
                "n_groups": 2,
                "beta": [0.9, -0.6, 0.5, 0.3],
                "group_shift": [0.0, -0.5],
                "noise_scale": 0.4,
                "censor_rate_target": [0.25, 0.35],
                "bias_strength": 1.5,
                "seed": 0
            }
        }],
        "scenarios": ["LinearAFT"],
        "methods": ["Vanilla", "CMIA"],
        "seeds": [1, 2],
        "out_dir": dir,
        "train": {
            "scenario": "LinearAFT",
            "method": "Vanilla",
            "epochs": 120,
            "lambda1": 50.0,
            "noise": { "m": 15, "tau": 1.0, "seed": 0 }
        }
    });
    let plan_path = dir.join("plan.json");
    fs::write(&plan_path, serde_json::to_string_pretty(&plan)?)?;

    run_benchmark(&plan_path)?;

    println!("\n--- results.csv ---");
    print!("{}", fs::read_to_string(dir.join("results.csv"))?);
    println!("--- radar.csv ---");
    print!("{}", fs::read_to_string(dir.join("radar.csv"))?);
    Ok(())
}
