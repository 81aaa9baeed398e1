//! Learnable censored-data augmentation: non-negative additional durations
//! for the censored training observations and construction of the augmented
//! dataset they induce.

use serde::{Deserialize, Serialize};

use crate::dataset::SurvivalDataset;
use crate::error::{Error, Result};

/// One learnable duration per censored training observation, in
/// censored-observation order. An entry above `epsilon_active` flips the
/// observation's indicator to uncensored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaParams {
    pub values: Vec<f64>,
    pub epsilon_active: f64,
}

pub const DEFAULT_EPSILON_ACTIVE: f64 = 1e-6;

impl DeltaParams {
    pub fn zeros(n_censored: usize) -> Self {
        DeltaParams {
            values: vec![0.0; n_censored],
            epsilon_active: DEFAULT_EPSILON_ACTIVE,
        }
    }

    pub fn constant(n_censored: usize, value: f64) -> Self {
        DeltaParams {
            values: vec![value; n_censored],
            epsilon_active: DEFAULT_EPSILON_ACTIVE,
        }
    }

    /// Componentwise clamp to non-negative values. Idempotent.
    pub fn project(&mut self) {
        for v in &mut self.values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(Error::Validation(
                "augmentation durations must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Augmented (times, events): uncensored observations unchanged, each
/// censored observation j becomes (T_j + delta_j, I(delta_j > eps)).
/// Ordering is preserved; features and groups are untouched.
pub fn augment_times_events(
    times: &[f64],
    events: &[u8],
    deltas: &DeltaParams,
) -> Result<(Vec<f64>, Vec<u8>)> {
    deltas.validate()?;
    let n_censored = events.iter().filter(|&&e| e == 0).count();
    if deltas.values.len() != n_censored {
        return Err(Error::Validation(format!(
            "delta length {} does not match censored count {n_censored}",
            deltas.values.len()
        )));
    }
    let mut out_t = times.to_vec();
    let mut out_e = events.to_vec();
    let mut j = 0;
    for i in 0..times.len() {
        if events[i] == 0 {
            let d = deltas.values[j];
            out_t[i] = times[i] + d;
            out_e[i] = u8::from(d > deltas.epsilon_active);
            j += 1;
        }
    }
    Ok((out_t, out_e))
}

/// Dataset-level augmentation; see [`augment_times_events`].
pub fn augment(ds: &SurvivalDataset, deltas: &DeltaParams) -> Result<SurvivalDataset> {
    let (times, events) = augment_times_events(&ds.times(), &ds.events(), deltas)?;
    let mut out = ds.clone();
    for (obs, (t, e)) in out.observations.iter_mut().zip(times.into_iter().zip(events)) {
        obs.time = t;
        obs.event = e;
    }
    Ok(out)
}

/// Scatter per-observation time gradients back onto the delta vector:
/// d T~_j / d delta_j = 1 for censored observations, so the delta gradient
/// is the time gradient at the censored positions.
pub fn gather_delta_grad(time_grads: &[f64], events: &[u8]) -> Vec<f64> {
    events
        .iter()
        .zip(time_grads)
        .filter(|(&e, _)| e == 0)
        .map(|(_, &g)| g)
        .collect()
}
