use std::path::PathBuf;

use crate::dataset::{split, SplitSpec};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, CSV_HEADER};

use super::train_run::{load_checkpoint, load_dataset_with_schema};

#[derive(Debug, Clone)]
pub struct EvaluateArgs {
    pub checkpoint: PathBuf,
    pub dataset: PathBuf,
    pub schema: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub split: SplitSpec,
}

/// Evaluate a checkpoint on the test split; writes `report.json` and a flat
/// `report.csv` row.
pub fn run_evaluate(args: &EvaluateArgs) -> Result<()> {
    let trained = load_checkpoint(&args.checkpoint)?;
    let ds = load_dataset_with_schema(&args.dataset, args.schema.as_deref())?;
    if trained.model.input_dim() != ds.n_features() {
        return Err(Error::Shape(format!(
            "checkpoint expects {} features, dataset has {}",
            trained.model.input_dim(),
            ds.n_features()
        )));
    }
    let (_, _, ds_test) = split(&ds, &args.split)?;
    let name = args
        .dataset
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let report = evaluate(&trained, &ds_test, &name, args.split.seed)?;

    std::fs::create_dir_all(&args.out_dir)?;
    std::fs::write(
        args.out_dir.join("report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    std::fs::write(
        args.out_dir.join("report.csv"),
        format!("{CSV_HEADER}\n{}\n", report.csv_row()),
    )?;
    for flag in &report.flags {
        eprintln!("warning: {flag}");
    }
    println!(
        "aAUC {:.4}  aBrier {:.4}  adTPR {:.4}  adFPR {:.4}",
        report.aauc, report.abrier, report.adtpr, report.adfpr
    );
    Ok(())
}

