use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::augment::{augment_times_events, DeltaParams, DEFAULT_EPSILON_ACTIVE};
use crate::dataset::{split, SplitSpec, SurvivalDataset};
use crate::error::{Error, Result};
use crate::fairness::{eo_regularizer_raw, NoiseConfig};
use crate::model::Model;
use crate::survival::{aft_loss, cox_loss};
use crate::train::TrainedModel;

use super::train_run::{load_checkpoint, load_dataset_with_schema};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

/// Grid over two named linear coefficients; at every grid point the
/// foundational loss, the fairness term, and their sum are evaluated with
/// all other parameters held at the checkpoint values. Emitted twice: with
/// the augmentation durations frozen at zero and with the checkpoint
/// durations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LandscapeSpec {
    pub checkpoint: PathBuf,
    pub dataset: PathBuf,
    #[serde(default)]
    pub schema: Option<PathBuf>,
    pub split: SplitSpec,
    /// which split to evaluate on: "train", "val", or "test"
    #[serde(default = "default_part")]
    pub part: String,
    pub coefficients: [String; 2],
    pub axes: [Axis; 2],
    #[serde(default)]
    pub noise: NoiseConfig,
    pub out: PathBuf,
}

fn default_part() -> String {
    "train".into()
}

struct GridEval {
    rows: Vec<(f64, f64, f64, f64, f64)>,
    argmin_loss: (f64, f64),
    argmin_fair: (f64, f64),
    argmin_sum: (f64, f64),
}

fn axis_values(axis: &Axis) -> Result<Vec<f64>> {
    if axis.steps < 2 {
        return Err(Error::Validation("axis needs at least 2 steps".into()));
    }
    let step = (axis.max - axis.min) / (axis.steps - 1) as f64;
    Ok((0..axis.steps).map(|k| axis.min + step * k as f64).collect())
}

fn eval_grid(
    trained: &TrainedModel,
    coeff_idx: [usize; 2],
    axes: &[Axis; 2],
    ds: &SurvivalDataset,
    times: &[f64],
    events: &[u8],
    noise: &NoiseConfig,
) -> Result<GridEval> {
    let xs: Vec<Vec<f64>> = ds.observations.iter().map(|o| o.features.clone()).collect();
    let groups = ds.groups();
    let mut rows = Vec::new();
    let mut best = [(f64::INFINITY, (0.0, 0.0)); 3];
    for &c1 in &axis_values(&axes[0])? {
        for &c2 in &axis_values(&axes[1])? {
            let mut model = trained.model.clone();
            if let Model::Linear(m) = &mut model {
                m.weights[coeff_idx[0]] = c1;
                m.weights[coeff_idx[1]] = c2;
            }
            let scores = model.forward_batch(&xs)?;
            let loss = if trained.scenario.is_aft() {
                aft_loss(&scores, trained.log_sigma.unwrap_or(0.0), times, events)?.0
            } else {
                cox_loss(&scores, times, events)?.0
            };
            let (est, _) =
                eo_regularizer_raw(&scores, times, events, &groups, &ds.eval_times, noise)?;
            let sum = loss + est.total;
            rows.push((c1, c2, loss, est.total, sum));
            for (slot, value) in [(0, loss), (1, est.total), (2, sum)] {
                if value < best[slot].0 {
                    best[slot] = (value, (c1, c2));
                }
            }
        }
    }
    Ok(GridEval {
        rows,
        argmin_loss: best[0].1,
        argmin_fair: best[1].1,
        argmin_sum: best[2].1,
    })
}

/// Run the landscape grid; writes a CSV with one row per (toggle, c1, c2)
/// plus `argmin` rows mirroring the contour-plot marker points.
pub fn run_landscape(spec_path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(spec_path)?;
    let spec: LandscapeSpec = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", spec_path.display())))?;
    let trained = load_checkpoint(&spec.checkpoint)?;
    let Model::Linear(linear) = &trained.model else {
        return Err(Error::Validation(
            "landscape grids need a linear checkpoint (named coefficients)".into(),
        ));
    };

    let ds = load_dataset_with_schema(&spec.dataset, spec.schema.as_deref())?;
    let coeff_idx = [
        feature_index(&ds, &spec.coefficients[0])?,
        feature_index(&ds, &spec.coefficients[1])?,
    ];
    if linear.weights.len() != ds.n_features() {
        return Err(Error::Shape("checkpoint/dataset dimension mismatch".into()));
    }

    let (tr, va, te) = split(&ds, &spec.split)?;
    let part = match spec.part.as_str() {
        "train" => tr,
        "val" => va,
        "test" => te,
        other => {
            return Err(Error::Validation(format!(
                "unknown split part '{other}' (expected train/val/test)"
            )))
        }
    };

    let mut noise = spec.noise.clone();
    noise.materialize(noise.seed)?;

    let base_times = part.times();
    let base_events = part.events();
    let n_censored = base_events.iter().filter(|&&e| e == 0).count();

    let mut out = String::from("toggle,c1,c2,foundational,fairness,sum\n");
    let mut toggles: Vec<(&str, Vec<f64>, Vec<u8>)> =
        vec![("delta_zero", base_times.clone(), base_events.clone())];
    if trained.deltas.is_empty() {
        // a vanilla checkpoint carries no augmentation; both toggles coincide
        toggles.push(("delta_checkpoint", base_times.clone(), base_events.clone()));
    } else {
        if trained.deltas.len() != n_censored {
            return Err(Error::Validation(format!(
                "checkpoint has {} durations but the {} split has {n_censored} censored observations; use the training split spec",
                trained.deltas.len(),
                spec.part
            )));
        }
        let deltas = DeltaParams {
            values: trained.deltas.clone(),
            epsilon_active: DEFAULT_EPSILON_ACTIVE,
        };
        let (t, e) = augment_times_events(&base_times, &base_events, &deltas)?;
        toggles.push(("delta_checkpoint", t, e));
    }

    for (name, times, events) in &toggles {
        let grid = eval_grid(&trained, coeff_idx, &spec.axes, &part, times, events, &noise)?;
        for (c1, c2, l, r, s) in &grid.rows {
            out.push_str(&format!("{name},{c1},{c2},{l},{r},{s}\n"));
        }
        for (kind, (c1, c2)) in [
            ("argmin_foundational", grid.argmin_loss),
            ("argmin_fairness", grid.argmin_fair),
            ("argmin_sum", grid.argmin_sum),
        ] {
            out.push_str(&format!("{name}_{kind},{c1},{c2},,,\n"));
        }
    }
    std::fs::write(&spec.out, out)?;
    println!("landscape grid written to {}", spec.out.display());
    Ok(())
}

fn feature_index(ds: &SurvivalDataset, name: &str) -> Result<usize> {
    ds.feature_names
        .iter()
        .position(|f| f == name)
        .ok_or_else(|| Error::Validation(format!("no feature named '{name}'")))
}
