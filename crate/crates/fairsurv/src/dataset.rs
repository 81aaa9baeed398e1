//! Censored survival datasets: ingestion, validation, splitting, labelling,
//! and a synthetic generator for desk-scale experiments.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One record: feature vector, observed duration, event indicator, and the
/// sensitive-attribute group index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub features: Vec<f64>,
    pub time: f64,
    pub event: u8,
    pub group: usize,
}

impl Observation {
    pub fn validate(&self, n_groups: usize, row: usize) -> Result<()> {
        if !(self.time > 0.0) {
            return Err(Error::Validation(format!(
                "row {row}: time must be positive, got {}",
                self.time
            )));
        }
        if self.event > 1 {
            return Err(Error::Validation(format!(
                "row {row}: event indicator must be 0 or 1, got {}",
                self.event
            )));
        }
        if self.group >= n_groups {
            return Err(Error::Validation(format!(
                "row {row}: group index {} out of range (|C| = {n_groups})",
                self.group
            )));
        }
        if self.features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "row {row}: non-finite feature value"
            )));
        }
        Ok(())
    }
}

/// A collection of observations together with feature/group names and the
/// pre-specified evaluation time points Q.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalDataset {
    pub observations: Vec<Observation>,
    pub feature_names: Vec<String>,
    pub group_labels: Vec<String>,
    pub eval_times: Vec<f64>,
}

impl SurvivalDataset {
    pub fn new(
        observations: Vec<Observation>,
        feature_names: Vec<String>,
        group_labels: Vec<String>,
        eval_times: Vec<f64>,
    ) -> Result<Self> {
        let p = feature_names.len();
        for (row, obs) in observations.iter().enumerate() {
            if obs.features.len() != p {
                return Err(Error::Shape(format!(
                    "row {row}: expected {p} features, got {}",
                    obs.features.len()
                )));
            }
            obs.validate(group_labels.len(), row)?;
        }
        if !eval_times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Validation(
                "eval_times must be strictly increasing".into(),
            ));
        }
        if eval_times.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::Validation("eval_times must be positive".into()));
        }
        Ok(Self {
            observations,
            feature_names,
            group_labels,
            eval_times,
        })
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_groups(&self) -> usize {
        self.group_labels.len()
    }

    pub fn times(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.time).collect()
    }

    pub fn events(&self) -> Vec<u8> {
        self.observations.iter().map(|o| o.event).collect()
    }

    pub fn groups(&self) -> Vec<usize> {
        self.observations.iter().map(|o| o.group).collect()
    }

    pub fn n_uncensored(&self) -> usize {
        self.observations.iter().filter(|o| o.event == 1).count()
    }

    /// Binary labels Y_t = I(T <= t, delta = 1) for every observation.
    pub fn labels_at(&self, t: f64) -> Vec<u8> {
        self.observations
            .iter()
            .map(|o| event_label(o, t))
            .collect()
    }
}

/// Y_t = I(T <= t, delta = 1). A censored observation counts as 0 even when
/// its observed duration precedes t.
pub fn event_label(obs: &Observation, t: f64) -> u8 {
    u8::from(obs.time <= t && obs.event == 1)
}

/// Train/validation/test split ratios and the shuffle seed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitSpec {
    pub ratios: [f64; 3],
    pub seed: u64,
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.ratios.iter().any(|r| *r < 0.0) {
            return Err(Error::Validation("split ratios must be non-negative".into()));
        }
        let sum: f64 = self.ratios.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "split ratios must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }
}

/// Disjoint partition into (train, val, test). Validation and test get
/// floor(ratio * n) observations each; the remainder goes to train.
pub fn split(
    ds: &SurvivalDataset,
    spec: &SplitSpec,
) -> Result<(SurvivalDataset, SurvivalDataset, SurvivalDataset)> {
    spec.validate()?;
    let n = ds.len();
    if n == 0 {
        return Err(Error::Validation("cannot split an empty dataset".into()));
    }
    let n_val = (spec.ratios[1] * n as f64).floor() as usize;
    let n_test = (spec.ratios[2] * n as f64).floor() as usize;
    let n_train = n - n_val - n_test;
    for (part, size, ratio) in [
        ("train", n_train, spec.ratios[0]),
        ("val", n_val, spec.ratios[1]),
        ("test", n_test, spec.ratios[2]),
    ] {
        if ratio > 0.0 && size == 0 {
            return Err(Error::Validation(format!(
                "{part} split is empty at n = {n} with ratio {ratio}"
            )));
        }
    }

    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    idx.shuffle(&mut rng);

    let take = |range: &[usize]| SurvivalDataset {
        observations: range.iter().map(|&i| ds.observations[i].clone()).collect(),
        feature_names: ds.feature_names.clone(),
        group_labels: ds.group_labels.clone(),
        eval_times: ds.eval_times.clone(),
    };
    let train = take(&idx[..n_train]);
    let val = take(&idx[n_train..n_train + n_val]);
    let test = take(&idx[n_train + n_val..]);
    Ok((train, val, test))
}

/// Column-role mapping for CSV ingestion. Feature columns are every header
/// not claimed by a role. Multiple group columns are cross-producted into a
/// single categorical index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvSchema {
    pub time: String,
    pub event: String,
    pub groups: Vec<String>,
    #[serde(default)]
    pub standardize: bool,
    pub eval_times: Vec<f64>,
}

pub fn load_schema(path: &Path) -> Result<CsvSchema> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Load a CSV dataset under `schema`. Group columns are string-valued and
/// cross-producted: per-column values are indexed in first-seen order, and
/// the combined index enumerates the cartesian product of observed values.
pub fn load_dataset(path: &Path, schema: &CsvSchema) -> Result<SurvivalDataset> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::Io(std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string())))?;
    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing column '{name}'")))
    };
    let time_col = col(&schema.time)?;
    let event_col = col(&schema.event)?;
    let group_cols: Vec<usize> = schema
        .groups
        .iter()
        .map(|g| col(g))
        .collect::<Result<_>>()?;
    if group_cols.is_empty() {
        return Err(Error::Schema("schema names no group column".into()));
    }
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|i| *i != time_col && *i != event_col && !group_cols.contains(i))
        .collect();
    let feature_names: Vec<String> = feature_cols.iter().map(|&i| headers[i].clone()).collect();

    // first-seen value order per group column
    let mut col_values: Vec<Vec<String>> = vec![Vec::new(); group_cols.len()];
    let mut rows: Vec<(Vec<f64>, f64, u8, Vec<usize>)> = Vec::new();

    for (ridx, record) in reader.records().enumerate() {
        let record = record?;
        let row = ridx + 2; // 1-based, after the header
        let parse_num = |i: usize| -> Result<f64> {
            record[i]
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("row {row}: non-numeric value '{}' in column '{}'", &record[i], headers[i])))
        };
        let time = parse_num(time_col)?;
        if !(time > 0.0) {
            return Err(Error::Validation(format!("row {row}: time must be positive, got {time}")));
        }
        let event_raw = parse_num(event_col)?;
        if event_raw != 0.0 && event_raw != 1.0 {
            return Err(Error::Validation(format!(
                "row {row}: event value {event_raw} outside {{0,1}}"
            )));
        }
        let features = feature_cols
            .iter()
            .map(|&i| parse_num(i))
            .collect::<Result<Vec<f64>>>()?;
        let mut per_col = Vec::with_capacity(group_cols.len());
        for (ci, &gc) in group_cols.iter().enumerate() {
            let value = record[gc].trim().to_string();
            let pos = match col_values[ci].iter().position(|v| *v == value) {
                Some(p) => p,
                None => {
                    col_values[ci].push(value);
                    col_values[ci].len() - 1
                }
            };
            per_col.push(pos);
        }
        rows.push((features, time, event_raw as u8, per_col));
    }

    // dense combined index over the cartesian product of observed values
    let cards: Vec<usize> = col_values.iter().map(|v| v.len()).collect();
    let combined = |per_col: &[usize]| -> usize {
        per_col
            .iter()
            .zip(&cards)
            .fold(0usize, |acc, (&v, &card)| acc * card + v)
    };
    let mut group_labels = Vec::new();
    let total: usize = cards.iter().product();
    for flat in 0..total {
        let mut rem = flat;
        let mut parts = Vec::new();
        for (ci, &card) in cards.iter().enumerate().rev() {
            parts.push((ci, rem % card));
            rem /= card;
        }
        parts.reverse();
        let label = parts
            .iter()
            .map(|&(ci, v)| format!("{}={}", schema.groups[ci], col_values[ci][v]))
            .collect::<Vec<_>>()
            .join("|");
        group_labels.push(label);
    }

    let mut observations: Vec<Observation> = rows
        .into_iter()
        .map(|(features, time, event, per_col)| Observation {
            features,
            time,
            event,
            group: combined(&per_col),
        })
        .collect();

    if schema.standardize {
        standardize(&mut observations, feature_names.len());
    }

    SurvivalDataset::new(observations, feature_names, group_labels, schema.eval_times.clone())
}

/// Per-feature (x - mean) / sd, with sd floored at 1e-12.
fn standardize(observations: &mut [Observation], p: usize) {
    let n = observations.len().max(1) as f64;
    for k in 0..p {
        let mean = observations.iter().map(|o| o.features[k]).sum::<f64>() / n;
        let var = observations
            .iter()
            .map(|o| (o.features[k] - mean).powi(2))
            .sum::<f64>()
            / n;
        let sd = var.sqrt().max(1e-12);
        for o in observations.iter_mut() {
            o.features[k] = (o.features[k] - mean) / sd;
        }
    }
}

/// Write a dataset back to CSV (features, time, event, group) plus a JSON
/// schema sidecar at `<path>.schema.json`.
pub fn write_csv(ds: &SurvivalDataset, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = ds.feature_names.clone();
    header.extend(["time".into(), "event".into(), "group".into()]);
    writer.write_record(&header)?;
    for obs in &ds.observations {
        let mut record: Vec<String> = obs.features.iter().map(|v| format!("{v}")).collect();
        record.push(format!("{}", obs.time));
        record.push(format!("{}", obs.event));
        record.push(format!("{}", obs.group));
        writer.write_record(&record)?;
    }
    writer.flush()?;

    let schema = CsvSchema {
        time: "time".into(),
        event: "event".into(),
        groups: vec!["group".into()],
        standardize: false,
        eval_times: ds.eval_times.clone(),
    };
    let sidecar = path.with_extension("schema.json");
    std::fs::write(sidecar, serde_json::to_string_pretty(&schema)?)?;
    Ok(())
}

/// Generative spec for synthetic censored data. Log event time is linear in
/// the features plus a per-group shift; censoring is exponential with a
/// per-group rate calibrated by bisection to hit `censor_rate_target`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub p: usize,
    pub n_groups: usize,
    pub beta: Vec<f64>,
    pub group_shift: Vec<f64>,
    pub noise_scale: f64,
    pub censor_rate_target: Vec<f64>,
    #[serde(default)]
    pub bias_strength: f64,
    pub seed: u64,
    /// Optional explicit Q; defaults to the 0.25/0.5/0.75 quantiles of T.
    #[serde(default)]
    pub eval_times: Option<Vec<f64>>,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::Validation("synthesis needs n >= 10".into()));
        }
        if self.beta.len() != self.p {
            return Err(Error::Shape(format!(
                "beta length {} does not match p = {}",
                self.beta.len(),
                self.p
            )));
        }
        if self.group_shift.len() != self.n_groups {
            return Err(Error::Shape("group_shift length must equal n_groups".into()));
        }
        if self.censor_rate_target.len() != self.n_groups {
            return Err(Error::Shape(
                "censor_rate_target length must equal n_groups".into(),
            ));
        }
        if self
            .censor_rate_target
            .iter()
            .any(|r| !(*r > 0.0 && *r < 1.0))
        {
            return Err(Error::Validation(
                "censor_rate_target entries must lie in (0,1)".into(),
            ));
        }
        if !(self.noise_scale > 0.0) {
            return Err(Error::Validation("noise_scale must be positive".into()));
        }
        if self.bias_strength < 0.0 {
            return Err(Error::Validation("bias_strength must be non-negative".into()));
        }
        Ok(())
    }
}

/// Deterministic synthetic dataset. The group-differential feature noise of
/// scale `bias_strength * group_index` lands on the first ceil(p/2)
/// coordinates after the latent time is drawn, so noisier groups carry
/// genuinely less signal.
pub fn synthesize(spec: &SynthSpec) -> Result<SurvivalDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = StandardNormal;
    let biased = spec.p.div_ceil(2);

    let mut groups = Vec::with_capacity(spec.n);
    let mut event_times = Vec::with_capacity(spec.n);
    let mut features = Vec::with_capacity(spec.n);
    let mut censor_u = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let z = i % spec.n_groups;
        let mut x: Vec<f64> = (0..spec.p).map(|_| normal.sample(&mut rng)).collect();
        let lin: f64 = x.iter().zip(&spec.beta).map(|(a, b)| a * b).sum();
        let log_t = lin + spec.group_shift[z] + spec.noise_scale * rng.sample::<f64, _>(StandardNormal);
        // measurement noise on the designated feature subset
        let noise_scale = spec.bias_strength * z as f64;
        if noise_scale > 0.0 {
            for item in x.iter_mut().take(biased) {
                *item += noise_scale * rng.sample::<f64, _>(StandardNormal);
            }
        }
        groups.push(z);
        event_times.push(log_t.exp());
        features.push(x);
        censor_u.push(rng.gen::<f64>().max(1e-300));
    }

    // per-group exponential censoring rate fitted by bisection; the same
    // uniform draws back every probe, so the censored fraction is monotone
    // in the rate
    let mut rates = vec![0.0f64; spec.n_groups];
    for z in 0..spec.n_groups {
        let members: Vec<usize> = (0..spec.n).filter(|&i| groups[i] == z).collect();
        let frac_at = |rate: f64| -> f64 {
            let censored = members
                .iter()
                .filter(|&&i| event_times[i] > -censor_u[i].ln() / rate)
                .count();
            censored as f64 / members.len() as f64
        };
        let target = spec.censor_rate_target[z];
        let mut lo = 1e-12;
        let mut hi = 1.0;
        while frac_at(hi) < target && hi < 1e12 {
            hi *= 2.0;
        }
        let mut rate = hi;
        let mut converged = false;
        for _ in 0..100 {
            rate = 0.5 * (lo + hi);
            let frac = frac_at(rate);
            if (frac - target).abs() <= 0.05 {
                converged = true;
                break;
            }
            if frac < target {
                lo = rate;
            } else {
                hi = rate;
            }
        }
        if !converged {
            return Err(Error::Numeric(format!(
                "censoring calibration did not converge for group {z} (target {target})"
            )));
        }
        rates[z] = rate;
    }

    let mut observations = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let censor_time = -censor_u[i].ln() / rates[groups[i]];
        let time = event_times[i].min(censor_time).max(1e-12);
        let event = u8::from(event_times[i] <= censor_time);
        observations.push(Observation {
            features: features[i].clone(),
            time,
            event,
            group: groups[i],
        });
    }

    let eval_times = match &spec.eval_times {
        Some(q) => q.clone(),
        None => {
            let mut ts: Vec<f64> = observations.iter().map(|o| o.time).collect();
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let quantile = |q: f64| ts[((ts.len() - 1) as f64 * q).round() as usize];
            let mut qs = vec![quantile(0.25), quantile(0.5), quantile(0.75)];
            qs.dedup_by(|a, b| a == b);
            qs
        }
    };

    let feature_names = (0..spec.p).map(|k| format!("f{k}")).collect();
    let group_labels = (0..spec.n_groups).map(|z| format!("g{z}")).collect();
    SurvivalDataset::new(observations, feature_names, group_labels, eval_times)
}

/// Realized censoring fraction per group.
pub fn censor_fractions(ds: &SurvivalDataset) -> Vec<f64> {
    let mut total = vec![0usize; ds.n_groups()];
    let mut censored = vec![0usize; ds.n_groups()];
    for obs in &ds.observations {
        total[obs.group] += 1;
        if obs.event == 0 {
            censored[obs.group] += 1;
        }
    }
    total
        .iter()
        .zip(&censored)
        .map(|(&t, &c)| if t == 0 { f64::NAN } else { c as f64 / t as f64 })
        .collect()
}

/// Hash of the serialized observations, used in run manifests.
pub fn dataset_hash(ds: &SurvivalDataset) -> String {
    use sha2::{Digest, Sha256};
    let bytes = serde_json::to_vec(ds).expect("dataset serializes");
    hex::encode(Sha256::digest(bytes))
}
