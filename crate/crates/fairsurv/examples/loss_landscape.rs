//! Sweep two coefficients of a trained linear model over a grid and record
//! the foundational loss, the fairness term, and their sum at every point,
//! plus the argmin of each surface — the data behind a contour plot showing
//! how the fairness term moves the optimum.
//!
//! Run with: `cargo run --release --example loss_landscape`

use std::fs;
use std::path::Path;

use fairsurv::commands::{run_landscape, run_synth, run_train};

fn main() -> fairsurv::Result<()> {
    let dir = Path::new("target/example_landscape");
    fs::create_dir_all(dir)?;

    let synth_spec = serde_json::json!({
        "n": 400,
        "p": 2,
        "n_groups": 2,
        "beta": [0.9, -0.6],
        "group_shift": [0.0, -0.5],
        "noise_scale": 0.4,
        "censor_rate_target": [0.25, 0.35],
        "bias_strength": 1.5,
        "seed": 5
    });
    fs::write(dir.join("synth.json"), serde_json::to_string_pretty(&synth_spec)?)?;
    run_synth(&dir.join("synth.json"), &dir.join("data.csv"))?;

    let run_config = serde_json::json!({
        "dataset": dir.join("data.csv"),
        "out_dir": dir.join("run"),
        "split": { "ratios": [0.8, 0.1, 0.1], "seed": 5 },
        "train": {
            "scenario": "LinearAFT",
            "method": "Vanilla",
            "epochs": 150,
            "seed": 5
        }
    });
    fs::write(dir.join("run.json"), serde_json::to_string_pretty(&run_config)?)?;
    run_train(&dir.join("run.json"))?;

    let landscape = serde_json::json!({
        "checkpoint": dir.join("run/checkpoint.json"),
        "dataset": dir.join("data.csv"),
        "split": { "ratios": [0.8, 0.1, 0.1], "seed": 5 },
        "coefficients": ["f0", "f1"],
        "axes": [
            { "min": -1.0, "max": 2.0, "steps": 13 },
            { "min": -2.0, "max": 1.0, "steps": 13 }
        ],
        "noise": { "m": 15, "tau": 1.0, "seed": 5 },
        "out": dir.join("landscape.csv")
    });
    fs::write(dir.join("landscape.json"), serde_json::to_string_pretty(&landscape)?)?;
    run_landscape(&dir.join("landscape.json"))?;

    let csv = fs::read_to_string(dir.join("landscape.csv"))?;
    for line in csv.lines().filter(|l| l.starts_with("argmin") || l.starts_with("toggle")) {
        println!("{line}");
    }
    println!("full grid written to {}", dir.join("landscape.csv").display());
    Ok(())
}
