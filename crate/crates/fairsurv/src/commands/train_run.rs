use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{dataset_hash, load_dataset, load_schema, split, SplitSpec, SurvivalDataset};
use crate::error::{Error, Result};
use crate::train::{train, TrainConfig, TrainedModel};

use super::sha256_hex;

/// Full training-run configuration: where the data lives, how to split it,
/// and the training hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset: PathBuf,
    /// defaults to `<dataset>.schema.json`
    #[serde(default)]
    pub schema: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub split: SplitSpec,
    pub train: TrainConfig,
}

#[derive(Debug, Serialize)]
struct Manifest {
    config_hash: String,
    dataset_hash: String,
    seed: u64,
    split_seed: u64,
}

pub fn load_run_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn schema_path_for(dataset: &Path, explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .unwrap_or_else(|| dataset.with_extension("schema.json"))
}

pub fn load_dataset_with_schema(dataset: &Path, schema: Option<&Path>) -> Result<SurvivalDataset> {
    let schema_path = schema_path_for(dataset, schema);
    let schema = load_schema(&schema_path)?;
    load_dataset(dataset, &schema)
}

/// Train from a run config file; writes `checkpoint.json`, `history.jsonl`,
/// and `manifest.json` under the configured output directory.
pub fn run_train(config_path: &Path) -> Result<()> {
    let config = load_run_config(config_path)?;
    config.train.validate()?;
    let ds = load_dataset_with_schema(&config.dataset, config.schema.as_deref())?;
    let (ds_train, ds_val, _) = split(&ds, &config.split)?;

    let trained = train(&ds_train, &ds_val, &config.train)?;
    write_run_outputs(&config, &ds, &trained)?;
    println!(
        "trained {:?} {:?} for {} epochs; outputs in {}",
        config.train.scenario,
        config.train.method,
        trained.history.len(),
        config.out_dir.display()
    );
    Ok(())
}

pub fn write_run_outputs(
    config: &RunConfig,
    full_dataset: &SurvivalDataset,
    trained: &TrainedModel,
) -> Result<()> {
    std::fs::create_dir_all(&config.out_dir)?;

    let mut checkpoint = trained.clone();
    let history = std::mem::take(&mut checkpoint.history);
    std::fs::write(
        config.out_dir.join("checkpoint.json"),
        serde_json::to_string_pretty(&checkpoint)?,
    )?;

    let mut log = std::fs::File::create(config.out_dir.join("history.jsonl"))?;
    for entry in &history {
        writeln!(log, "{}", serde_json::to_string(entry)?)?;
    }

    let manifest = Manifest {
        config_hash: sha256_hex(&serde_json::to_vec(config)?),
        dataset_hash: dataset_hash(full_dataset),
        seed: config.train.seed,
        split_seed: config.split.seed,
    };
    std::fs::write(
        config.out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<TrainedModel> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
