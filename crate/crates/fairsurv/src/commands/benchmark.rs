use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{split, SplitSpec, SurvivalDataset, SynthSpec};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, MetricReport, CSV_HEADER};
use crate::train::{train, Method, Scenario, TrainConfig};

use super::train_run::{load_dataset_with_schema, write_run_outputs, RunConfig};

/// Where a benchmark dataset comes from: a CSV on disk or the synthetic
/// generator (re-seeded per benchmark seed).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSource {
    pub name: String,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub schema: Option<PathBuf>,
    #[serde(default)]
    pub synth: Option<SynthSpec>,
}

fn default_ratios() -> [f64; 3] {
    [0.8, 0.1, 0.1]
}

/// A full sweep: every (dataset x scenario x method x seed) cell is split,
/// trained, and evaluated in an isolated subdirectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkPlan {
    pub datasets: Vec<DatasetSource>,
    pub scenarios: Vec<Scenario>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    #[serde(default = "default_ratios")]
    pub split_ratios: [f64; 3],
    /// template hyperparameters; scenario, method, and seed are overwritten
    /// per cell
    #[serde(default)]
    pub train: Option<TrainConfig>,
}

impl BenchmarkPlan {
    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() || self.scenarios.is_empty() || self.methods.is_empty() || self.seeds.is_empty()
        {
            return Err(Error::Validation(
                "benchmark plan needs non-empty datasets, scenarios, methods, and seeds".into(),
            ));
        }
        for d in &self.datasets {
            if d.csv.is_none() == d.synth.is_none() {
                return Err(Error::Validation(format!(
                    "dataset '{}' must name exactly one of csv or synth",
                    d.name
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Cell {
    dataset: usize,
    scenario: Scenario,
    method: Method,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct CellFailure {
    dataset: String,
    scenario: String,
    method: String,
    seed: u64,
    error: String,
}

fn cell_dataset(source: &DatasetSource, seed: u64) -> Result<SurvivalDataset> {
    match (&source.csv, &source.synth) {
        (Some(path), None) => load_dataset_with_schema(path, source.schema.as_deref()),
        (None, Some(spec)) => {
            let mut spec = spec.clone();
            spec.seed = seed;
            crate::dataset::synthesize(&spec)
        }
        _ => unreachable!("validated"),
    }
}

fn run_cell(plan: &BenchmarkPlan, cell: &Cell) -> Result<MetricReport> {
    let source = &plan.datasets[cell.dataset];
    let ds = cell_dataset(source, cell.seed)?;
    let splits = split(
        &ds,
        &SplitSpec {
            ratios: plan.split_ratios,
            seed: cell.seed,
        },
    )?;
    let (ds_train, ds_val, ds_test) = splits;

    let mut cfg = plan.train.clone().unwrap_or_else(|| TrainConfig {
        scenario: cell.scenario,
        method: cell.method,
        lambda1: 1.0,
        lambda2: 1e-4,
        learning_rate: 1e-2,
        epochs: 500,
        noise: Default::default(),
        delta_init: None,
        seed: cell.seed,
        patience: 50,
        hidden_widths: vec![32, 32],
        select_on_joint: false,
    });
    cfg.scenario = cell.scenario;
    cfg.method = cell.method;
    cfg.seed = cell.seed;
    cfg.noise.seed = cell.seed;
    if cfg.scenario.is_deep() && plan.train.as_ref().map_or(true, |t| t.learning_rate == 1e-2) {
        cfg.learning_rate = 1e-3;
    }

    let trained = train(&ds_train, &ds_val, &cfg)?;

    let cell_dir = plan.out_dir.join("cells").join(format!(
        "{}_{:?}_{:?}_{}",
        source.name, cell.scenario, cell.method, cell.seed
    ));
    let run_config = RunConfig {
        dataset: source.csv.clone().unwrap_or_else(|| PathBuf::from("synthetic")),
        schema: source.schema.clone(),
        out_dir: cell_dir.clone(),
        split: SplitSpec {
            ratios: plan.split_ratios,
            seed: cell.seed,
        },
        train: cfg,
    };
    write_run_outputs(&run_config, &ds, &trained)?;

    let report = evaluate(&trained, &ds_test, &source.name, cell.seed)?;
    std::fs::write(
        cell_dir.join("report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len().max(1) as f64
}

/// Run the sweep. Individual cell failures are recorded in `failures.json`
/// and the sweep continues; the call errors only when every cell fails.
pub fn run_benchmark(plan_path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(plan_path)?;
    let plan: BenchmarkPlan = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", plan_path.display())))?;
    plan.validate()?;
    std::fs::create_dir_all(&plan.out_dir)?;

    let mut cells = Vec::new();
    for d in 0..plan.datasets.len() {
        for &scenario in &plan.scenarios {
            for &method in &plan.methods {
                for &seed in &plan.seeds {
                    cells.push(Cell {
                        dataset: d,
                        scenario,
                        method,
                        seed,
                    });
                }
            }
        }
    }

    let outcomes: Vec<(Cell, Result<MetricReport>)> = cells
        .into_par_iter()
        .map(|cell| {
            let out = run_cell(&plan, &cell);
            (cell, out)
        })
        .collect();

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (cell, outcome) in outcomes {
        match outcome {
            Ok(r) => reports.push(r),
            Err(e) => failures.push(CellFailure {
                dataset: plan.datasets[cell.dataset].name.clone(),
                scenario: format!("{:?}", cell.scenario),
                method: format!("{:?}", cell.method),
                seed: cell.seed,
                error: e.to_string(),
            }),
        }
    }
    if !failures.is_empty() {
        std::fs::write(
            plan.out_dir.join("failures.json"),
            serde_json::to_string_pretty(&failures)?,
        )?;
        eprintln!("{} cell(s) failed; see failures.json", failures.len());
    }
    if reports.is_empty() {
        return Err(Error::Validation("every benchmark cell failed".into()));
    }

    // per-seed rows, seed means, and % change of CMIA vs Vanilla
    let mut table = String::from(CSV_HEADER);
    table.push('\n');
    for r in &reports {
        table.push_str(&r.csv_row());
        table.push('\n');
    }

    let mut radar = String::from("dataset,scenario,method,U_AUC,U_Brier,U_dtpr,U_dfpr\n");
    for d in &plan.datasets {
        for &scenario in &plan.scenarios {
            let mut means = std::collections::BTreeMap::new();
            for &method in &plan.methods {
                let rows: Vec<&MetricReport> = reports
                    .iter()
                    .filter(|r| {
                        r.dataset == d.name
                            && r.scenario == format!("{scenario:?}")
                            && r.method == format!("{method:?}")
                    })
                    .collect();
                if rows.is_empty() {
                    continue;
                }
                let aauc = mean(&rows.iter().map(|r| r.aauc).collect::<Vec<_>>());
                let abrier = mean(&rows.iter().map(|r| r.abrier).collect::<Vec<_>>());
                let adtpr = mean(&rows.iter().map(|r| r.adtpr).collect::<Vec<_>>());
                let adfpr = mean(&rows.iter().map(|r| r.adfpr).collect::<Vec<_>>());
                table.push_str(&format!(
                    "{},{scenario:?},{method:?},mean,{aauc},{abrier},{adtpr},{adfpr}\n",
                    d.name
                ));
                let u = crate::metrics::radar_utilities(aauc, abrier, adtpr, adfpr);
                radar.push_str(&format!(
                    "{},{scenario:?},{method:?},{},{},{},{}\n",
                    d.name, u.u_auc, u.u_brier, u.u_dtpr, u.u_dfpr
                ));
                means.insert(format!("{method:?}"), [aauc, abrier, adtpr, adfpr]);
            }
            if let (Some(v), Some(c)) = (means.get("Vanilla"), means.get("CMIA")) {
                let pct = |i: usize| 100.0 * (c[i] - v[i]) / v[i];
                table.push_str(&format!(
                    "{},{scenario:?},%CMIA_vs_Vanilla,,{}%,{}%,{}%,{}%\n",
                    d.name,
                    pct(0),
                    pct(1),
                    pct(2),
                    pct(3)
                ));
            }
        }
    }

    std::fs::write(plan.out_dir.join("results.csv"), table)?;
    std::fs::write(plan.out_dir.join("radar.csv"), radar)?;
    println!(
        "benchmark complete: {} cells ok, {} failed; results in {}",
        reports.len(),
        failures.len(),
        plan.out_dir.display()
    );
    Ok(())
}
