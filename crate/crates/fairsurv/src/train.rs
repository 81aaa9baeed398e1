//! Joint training: the combined objective (foundational loss + fairness
//! regularizer + L2 penalty), Adam optimization over the model parameters,
//! the AFT scale, and the augmentation durations, plus the baseline methods
//! and ablations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::augment::{augment_times_events, gather_delta_grad, DeltaParams};
use crate::dataset::SurvivalDataset;
use crate::error::{Error, Result};
use crate::fairness::{eo_regularizer_raw, CmiEstimate, NoiseConfig};
use crate::model::{AftScale, Model};
use crate::survival::{aft_loss, aft_time_grad, breslow_baseline, cox_loss, BaselineHazard};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    LinearCOX,
    LinearAFT,
    DeepCOX,
    DeepAFT,
}

impl Scenario {
    pub fn is_aft(self) -> bool {
        matches!(self, Scenario::LinearAFT | Scenario::DeepAFT)
    }

    pub fn is_deep(self) -> bool {
        matches!(self, Scenario::DeepCOX | Scenario::DeepAFT)
    }
}

/// Variant names double as the benchmark column labels.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Vanilla,
    GD,
    CMIA,
    CMIA_NoReg,
    CMIA_NoAug,
}

impl Method {
    /// Does the method learn augmentation durations?
    pub fn learns_delta(self) -> bool {
        matches!(self, Method::CMIA | Method::CMIA_NoReg)
    }

    /// Does the method carry a fairness term, and which one?
    pub fn fairness_term(self) -> FairnessTerm {
        match self {
            Method::CMIA | Method::CMIA_NoAug => FairnessTerm::Cmi,
            Method::GD => FairnessTerm::GroupDifference,
            Method::Vanilla | Method::CMIA_NoReg => FairnessTerm::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FairnessTerm {
    None,
    Cmi,
    GroupDifference,
}

fn default_lr() -> f64 {
    1e-2
}
fn default_epochs() -> usize {
    500
}
fn default_patience() -> usize {
    50
}
fn default_lambda1() -> f64 {
    1.0
}
fn default_lambda2() -> f64 {
    1e-4
}
fn default_hidden() -> Vec<usize> {
    vec![32, 32]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub scenario: Scenario,
    pub method: Method,
    #[serde(default = "default_lambda1")]
    pub lambda1: f64,
    #[serde(default = "default_lambda2")]
    pub lambda2: f64,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default)]
    pub noise: NoiseConfig,
    /// Initial delta; defaults to 0.01 * median uncensored training time.
    #[serde(default)]
    pub delta_init: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_patience")]
    pub patience: usize,
    #[serde(default = "default_hidden")]
    pub hidden_widths: Vec<usize>,
    /// Select the retained epoch on joint loss instead of foundational loss.
    #[serde(default)]
    pub select_on_joint: bool,
}

impl TrainConfig {
    /// Config with the documented defaults for everything except the
    /// scenario and method.
    pub fn new(scenario: Scenario, method: Method) -> Self {
        Self {
            scenario,
            method,
            lambda1: default_lambda1(),
            lambda2: default_lambda2(),
            learning_rate: default_lr(),
            epochs: default_epochs(),
            noise: NoiseConfig::default(),
            delta_init: None,
            seed: 0,
            patience: default_patience(),
            hidden_widths: default_hidden(),
            select_on_joint: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda1 < 0.0 || self.lambda2 < 0.0 {
            return Err(Error::Validation("lambda1 and lambda2 must be >= 0".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Validation("epochs must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Validation("learning_rate must be positive".into()));
        }
        self.noise.validate()
    }
}

/// Pairwise absolute differences of groupwise mean scores, with subgradient
/// per observation; 0 at exact equality.
pub fn gd_regularizer(scores: &[f64], z: &[usize]) -> Result<(f64, Vec<f64>)> {
    let n = scores.len();
    if n == 0 {
        return Err(Error::Validation("gd_regularizer needs observations".into()));
    }
    let n_groups = z.iter().max().unwrap() + 1;
    let mut sums = vec![0.0; n_groups];
    let mut counts = vec![0usize; n_groups];
    for (&g, &zz) in scores.iter().zip(z) {
        sums[zz] += g;
        counts[zz] += 1;
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::Validation("gd_regularizer: empty group".into()));
    }
    let means: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();

    let mut value = 0.0;
    // per-group coefficient on the mean
    let mut coeff = vec![0.0; n_groups];
    for a in 0..n_groups {
        for b in a + 1..n_groups {
            let diff = means[a] - means[b];
            value += diff.abs();
            let s = if diff > 0.0 {
                1.0
            } else if diff < 0.0 {
                -1.0
            } else {
                0.0
            };
            coeff[a] += s;
            coeff[b] -= s;
        }
    }
    let grad = z
        .iter()
        .map(|&zz| coeff[zz] / counts[zz] as f64)
        .collect();
    Ok((value, grad))
}

/// Loss components and parameter gradients of one joint-objective evaluation.
pub struct JointEval {
    pub total: f64,
    pub foundational: f64,
    pub fairness: f64,
    pub l2: f64,
    pub per_time_cmi: Vec<f64>,
    pub grad_params: Vec<f64>,
    pub grad_log_sigma: f64,
    pub grad_deltas: Vec<f64>,
}

/// Evaluate total = L + lambda1 * fairness + lambda2 * ||theta||^2 on the
/// augmented training data, with gradients for theta, log sigma, and delta.
/// `deltas = None` means the method keeps delta frozen at zero and evaluates
/// on the original records.
pub fn joint_loss(
    model: &Model,
    scale: Option<&AftScale>,
    deltas: Option<&DeltaParams>,
    ds: &SurvivalDataset,
    config: &TrainConfig,
    noise: &NoiseConfig,
) -> Result<JointEval> {
    let xs: Vec<Vec<f64>> = ds.observations.iter().map(|o| o.features.clone()).collect();
    let base_times = ds.times();
    let base_events = ds.events();
    let (times, events) = match deltas {
        Some(d) => augment_times_events(&base_times, &base_events, d)?,
        None => (base_times.clone(), base_events.clone()),
    };
    let scores = model.forward_batch(&xs)?;

    let (foundational, mut upstream, grad_log_sigma, time_grads) = if config.scenario.is_aft() {
        let ls = scale
            .ok_or_else(|| Error::Validation("AFT scenario needs a scale parameter".into()))?
            .log_sigma;
        let (loss, grad, gls) = aft_loss(&scores, ls, &times, &events)?;
        let tg = aft_time_grad(&scores, ls, &times, &events);
        (loss, grad, gls, tg)
    } else {
        let (loss, grad) = cox_loss(&scores, &times, &events)?;
        // risk-set membership is locally constant in the durations
        (loss, grad, 0.0, vec![0.0; scores.len()])
    };

    let (fairness, fair_grad, per_time_cmi) = match config.method.fairness_term() {
        FairnessTerm::Cmi => {
            let (est, grad) = eo_regularizer_raw(
                &scores,
                &times,
                &events,
                &ds.groups(),
                &ds.eval_times,
                noise,
            )?;
            let CmiEstimate { per_time, total } = est;
            (total, grad, per_time)
        }
        FairnessTerm::GroupDifference => {
            let (v, g) = gd_regularizer(&scores, &ds.groups())?;
            (v, g, Vec::new())
        }
        FairnessTerm::None => (0.0, vec![0.0; scores.len()], Vec::new()),
    };

    for (u, f) in upstream.iter_mut().zip(&fair_grad) {
        *u += config.lambda1 * f;
    }
    let mut grad_params = model.backward(&xs, &upstream)?;
    let theta = model.params_flat();
    let l2: f64 = theta.iter().map(|w| w * w).sum();
    for (g, w) in grad_params.iter_mut().zip(&theta) {
        *g += 2.0 * config.lambda2 * w;
    }

    let grad_deltas = if deltas.is_some() {
        gather_delta_grad(&time_grads, &base_events)
    } else {
        Vec::new()
    };

    let fairness_scaled = config.lambda1 * fairness;
    Ok(JointEval {
        total: foundational + fairness_scaled + config.lambda2 * l2,
        foundational,
        fairness,
        l2,
        per_time_cmi,
        grad_params,
        grad_log_sigma,
        grad_deltas,
    })
}

/// Adam accumulators for one parameter block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        AdamState {
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            step: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) {
        debug_assert_eq!(params.len(), grads.len());
        self.step += 1;
        let b1t = 1.0 - self.beta1.powi(self.step as i32);
        let b2t = 1.0 - self.beta2.powi(self.step as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            let mhat = self.m[i] / b1t;
            let vhat = self.v[i] / b2t;
            params[i] -= lr * mhat / (vhat.sqrt() + self.eps);
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub total: f64,
    pub foundational: f64,
    pub fairness: f64,
    pub l2: f64,
    pub per_time_cmi: Vec<f64>,
    pub val_loss: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedModel {
    pub scenario: Scenario,
    pub method: Method,
    pub model: Model,
    pub log_sigma: Option<f64>,
    pub baseline: Option<BaselineHazard>,
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub history: Vec<EpochLog>,
}

impl TrainedModel {
    /// S(t|X) under the trained model.
    pub fn survival(&self, x: &[f64], t: f64) -> Result<f64> {
        let g = self.model.forward(x)?;
        if self.scenario.is_aft() {
            let sigma = self
                .log_sigma
                .ok_or_else(|| Error::Validation("AFT checkpoint lacks log_sigma".into()))?
                .exp();
            Ok(crate::survival::survival_aft(g, sigma, t))
        } else {
            let base = self
                .baseline
                .as_ref()
                .ok_or_else(|| Error::Validation("Cox checkpoint lacks a baseline hazard".into()))?;
            Ok(crate::survival::survival_cox(base, g, t))
        }
    }
}

/// Validation foundational loss with delta frozen at zero; never augmented.
fn validation_loss(
    model: &Model,
    log_sigma: f64,
    scenario: Scenario,
    ds_val: &SurvivalDataset,
) -> Result<f64> {
    if ds_val.is_empty() {
        return Ok(f64::NAN);
    }
    let xs: Vec<Vec<f64>> = ds_val.observations.iter().map(|o| o.features.clone()).collect();
    let scores = model.forward_batch(&xs)?;
    if scenario.is_aft() {
        Ok(aft_loss(&scores, log_sigma, &ds_val.times(), &ds_val.events())?.0)
    } else {
        match cox_loss(&scores, &ds_val.times(), &ds_val.events()) {
            Ok((l, _)) => Ok(l),
            // an all-censored validation split cannot score a Cox model
            Err(Error::Validation(_)) => Ok(f64::NAN),
            Err(e) => Err(e),
        }
    }
}

/// Full-batch Adam over (theta, log sigma, delta), with delta projected
/// non-negative after every step, augmented risk sets rebuilt every epoch,
/// and the retained parameters chosen by best validation foundational loss.
pub fn train(
    ds_train: &SurvivalDataset,
    ds_val: &SurvivalDataset,
    config: &TrainConfig,
) -> Result<TrainedModel> {
    config.validate()?;
    if ds_train.n_uncensored() == 0 {
        return Err(Error::Validation(
            "training data has no uncensored observation".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let p = ds_train.n_features();
    let mut model = if config.scenario.is_deep() {
        Model::mlp(p, &config.hidden_widths, &mut rng)
    } else {
        Model::linear(p)
    };
    let mut log_sigma = 0.0f64;

    let n_censored = ds_train.len() - ds_train.n_uncensored();
    let mut deltas = if config.method.learns_delta() {
        let init = config.delta_init.unwrap_or_else(|| {
            let mut ts: Vec<f64> = ds_train
                .observations
                .iter()
                .filter(|o| o.event == 1)
                .map(|o| o.time)
                .collect();
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            0.01 * ts[ts.len() / 2]
        });
        Some(DeltaParams::constant(n_censored, init))
    } else {
        None
    };

    let mut noise = config.noise.clone();
    if config.method.fairness_term() == FairnessTerm::Cmi {
        noise.materialize(noise.seed)?;
    }

    let mut params = model.params_flat();
    let mut adam_theta = AdamState::new(params.len());
    let mut adam_sigma = AdamState::new(1);
    let mut adam_delta = AdamState::new(n_censored);

    let mut history = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, Vec<f64>, f64, Option<DeltaParams>)> = None;
    let mut stale = 0usize;

    for epoch in 0..config.epochs {
        if noise.resample_per_epoch && config.method.fairness_term() == FairnessTerm::Cmi {
            noise.materialize(noise.seed.wrapping_add(epoch as u64))?;
        }
        let scale = AftScale { log_sigma };
        let eval = joint_loss(
            &model,
            config.scenario.is_aft().then_some(&scale),
            deltas.as_ref(),
            ds_train,
            config,
            &noise,
        )?;
        for (name, v) in [
            ("foundational", eval.foundational),
            ("fairness", eval.fairness),
            ("l2", eval.l2),
        ] {
            if !v.is_finite() {
                return Err(Error::Divergence {
                    epoch,
                    component: name.into(),
                });
            }
        }

        adam_theta.step(&mut params, &eval.grad_params, config.learning_rate);
        model.set_params_flat(&params)?;
        if config.scenario.is_aft() {
            let mut ls = [log_sigma];
            adam_sigma.step(&mut ls, &[eval.grad_log_sigma], config.learning_rate);
            log_sigma = ls[0];
        }
        if let Some(d) = deltas.as_mut() {
            adam_delta.step(&mut d.values, &eval.grad_deltas, config.learning_rate);
            d.project();
        }

        let val_loss = validation_loss(&model, log_sigma, config.scenario, ds_val)?;
        let selection = if config.select_on_joint {
            // joint loss re-evaluated on train; validation stays foundational
            eval.total
        } else if val_loss.is_finite() {
            val_loss
        } else {
            eval.foundational
        };
        history.push(EpochLog {
            epoch,
            total: eval.total,
            foundational: eval.foundational,
            fairness: eval.fairness,
            l2: eval.l2,
            per_time_cmi: eval.per_time_cmi,
            val_loss,
        });

        let improved = best.as_ref().map_or(true, |(b, _, _, _)| selection < *b);
        if improved {
            best = Some((selection, params.clone(), log_sigma, deltas.clone()));
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
    }

    let (_, best_params, best_log_sigma, best_deltas) = best.expect("at least one epoch ran");
    model.set_params_flat(&best_params)?;
    let deltas = best_deltas;

    let baseline = if config.scenario.is_aft() {
        None
    } else {
        let xs: Vec<Vec<f64>> = ds_train.observations.iter().map(|o| o.features.clone()).collect();
        let scores = model.forward_batch(&xs)?;
        let (times, events) = match deltas.as_ref() {
            Some(d) => augment_times_events(&ds_train.times(), &ds_train.events(), d)?,
            None => (ds_train.times(), ds_train.events()),
        };
        Some(breslow_baseline(&scores, &times, &events)?)
    };

    Ok(TrainedModel {
        scenario: config.scenario,
        method: config.method,
        model,
        log_sigma: config.scenario.is_aft().then_some(best_log_sigma),
        baseline,
        deltas: deltas.map(|d| d.values).unwrap_or_default(),
        history,
    })
}
