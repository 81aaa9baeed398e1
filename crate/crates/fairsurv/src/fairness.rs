//! Conditional mutual information between predictions and the sensitive
//! attribute given the true labels: the exact plug-in estimate on binary
//! predictions, a differentiable kernel approximation on raw scores, and
//! the per-time-point fairness regularizer built from it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::SurvivalDataset;
use crate::error::{Error, Result};

/// Monte-Carlo noise for the kernel CMI approximation: m draws from
/// N(0, tau), with tau interpreted as the standard deviation. Draws are
/// materialized once and reused across epochs and time points unless
/// resampling is requested.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseConfig {
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub seed: u64,
    /// resample the noise each epoch instead of fixing it per run
    #[serde(default)]
    pub resample_per_epoch: bool,
    #[serde(skip)]
    pub draws: Vec<f64>,
}

fn default_m() -> usize {
    100
}
fn default_tau() -> f64 {
    1.0
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            m: default_m(),
            tau: default_tau(),
            seed: 0,
            resample_per_epoch: false,
            draws: Vec::new(),
        }
    }
}

impl NoiseConfig {
    pub fn new(m: usize, tau: f64, seed: u64) -> Result<Self> {
        let mut cfg = NoiseConfig {
            m,
            tau,
            seed,
            resample_per_epoch: false,
            draws: Vec::new(),
        };
        cfg.materialize(seed)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Validation("noise draw count m must be >= 1".into()));
        }
        if !(self.tau > 0.0) {
            return Err(Error::Validation("kernel bandwidth tau must be positive".into()));
        }
        Ok(())
    }

    pub fn materialize(&mut self, seed: u64) -> Result<()> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, self.tau)
            .map_err(|e| Error::Validation(format!("bad noise distribution: {e}")))?;
        self.draws = (0..self.m).map(|_| normal.sample(&mut rng)).collect();
        Ok(())
    }
}

/// Per-time-point kernel CMI values and their sum, the fairness regularizer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CmiEstimate {
    pub per_time: Vec<f64>,
    pub total: f64,
}

/// Plug-in conditional mutual information of (yhat; z | y) on the empirical
/// joint mass, in nats. Zero-mass cells contribute nothing.
pub fn exact_cmi(yhat: &[u8], y: &[u8], z: &[usize]) -> Result<f64> {
    let n = yhat.len();
    if n == 0 {
        return Err(Error::Validation("exact_cmi needs at least one record".into()));
    }
    if y.len() != n || z.len() != n {
        return Err(Error::Shape("exact_cmi input length mismatch".into()));
    }
    let n_groups = z.iter().max().unwrap() + 1;
    // joint counts over (yhat, y, z)
    let mut joint = vec![0usize; 2 * 2 * n_groups];
    for i in 0..n {
        joint[(yhat[i] as usize * 2 + y[i] as usize) * n_groups + z[i]] += 1;
    }
    let count = |yh: usize, yy: usize, zz: usize| joint[(yh * 2 + yy) * n_groups + zz];
    let nf = n as f64;
    let mut cmi = 0.0;
    for yy in 0..2 {
        let n_y: usize = (0..2).map(|yh| (0..n_groups).map(|zz| count(yh, yy, zz)).sum::<usize>()).sum();
        if n_y == 0 {
            continue;
        }
        for zz in 0..n_groups {
            let n_yz: usize = (0..2).map(|yh| count(yh, yy, zz)).sum();
            if n_yz == 0 {
                continue;
            }
            for yh in 0..2 {
                let c = count(yh, yy, zz);
                if c == 0 {
                    continue;
                }
                let p_joint = c as f64 / nf;
                let p_cond_zy = c as f64 / n_yz as f64;
                let n_yh_y: usize = (0..n_groups).map(|g| count(yh, yy, g)).sum();
                let p_cond_y = n_yh_y as f64 / n_y as f64;
                cmi += p_joint * (p_cond_zy / p_cond_y).ln();
            }
        }
    }
    Ok(cmi)
}

/// Strata index lists shared across the noise draws: per (y, z) cell and per
/// y value. Self-inclusion keeps every kernel sum strictly positive.
struct Strata {
    yz_of: Vec<usize>,
    y_of: Vec<usize>,
    yz_members: Vec<Vec<usize>>,
    y_members: Vec<Vec<usize>>,
}

fn build_strata(y: &[u8], z: &[usize]) -> Strata {
    let n_groups = z.iter().max().map_or(1, |g| g + 1);
    let mut yz_members = vec![Vec::new(); 2 * n_groups];
    let mut y_members = vec![Vec::new(); 2];
    let mut yz_of = Vec::with_capacity(y.len());
    let mut y_of = Vec::with_capacity(y.len());
    for i in 0..y.len() {
        let yz = y[i] as usize * n_groups + z[i];
        yz_members[yz].push(i);
        y_members[y[i] as usize].push(i);
        yz_of.push(yz);
        y_of.push(y[i] as usize);
    }
    Strata {
        yz_of,
        y_of,
        yz_members,
        y_members,
    }
}

/// log sum_l exp(-(eps + g_i - g_l)^2 / (2 tau^2)) over a stratum, with max
/// subtraction.
fn stratum_lse(g_i: f64, eps: f64, scores: &[f64], members: &[usize], inv_2tau2: f64) -> f64 {
    let mut max_u = f64::NEG_INFINITY;
    for &l in members {
        let x = eps + g_i - scores[l];
        let u = -x * x * inv_2tau2;
        if u > max_u {
            max_u = u;
        }
    }
    let mut sum = 0.0;
    for &l in members {
        let x = eps + g_i - scores[l];
        sum += (-x * x * inv_2tau2 - max_u).exp();
    }
    max_u + sum.ln()
}

/// Kernel approximation of CMI(eps + g; Z | Y) at one time point:
///
///   (1/n) sum_i (1/m) sum_j log [ N_ij / D_ij ]
///
/// where N_ij averages the N(0, tau) density of (eps_j + g_i - g_l) over the
/// (Y_i, Z_i) stratum and D_ij over the Y_i stratum, both including l = i.
/// Returns the value and its analytic gradient with respect to the scores.
pub fn cmi_approx(
    scores: &[f64],
    y_t: &[u8],
    z: &[usize],
    noise: &NoiseConfig,
) -> Result<(f64, Vec<f64>)> {
    let n = scores.len();
    if n == 0 {
        return Err(Error::Validation("cmi_approx needs at least one record".into()));
    }
    if y_t.len() != n || z.len() != n {
        return Err(Error::Shape("cmi_approx input length mismatch".into()));
    }
    if noise.draws.len() != noise.m {
        return Err(Error::Validation("noise draws not materialized".into()));
    }
    let strata = build_strata(y_t, z);
    let m = noise.m;
    let inv_2tau2 = 1.0 / (2.0 * noise.tau * noise.tau);
    let inv_tau2 = 1.0 / (noise.tau * noise.tau);

    // pass 1: unnormalized log-sum-exp per (i, j) for both strata
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let yz = &strata.yz_members[strata.yz_of[i]];
            let yy = &strata.y_members[strata.y_of[i]];
            let mut a = Vec::with_capacity(m);
            let mut b = Vec::with_capacity(m);
            for &eps in &noise.draws {
                a.push(stratum_lse(scores[i], eps, scores, yz, inv_2tau2));
                b.push(stratum_lse(scores[i], eps, scores, yy, inv_2tau2));
            }
            (a, b)
        })
        .collect();

    let mut value = 0.0;
    for i in 0..n {
        let n_yz = strata.yz_members[strata.yz_of[i]].len() as f64;
        let n_y = strata.y_members[strata.y_of[i]].len() as f64;
        let (a, b) = &rows[i];
        for j in 0..m {
            value += a[j] - n_yz.ln() - b[j] + n_y.ln();
        }
    }
    value /= (n * m) as f64;
    if !value.is_finite() {
        return Err(Error::Numeric("non-finite CMI approximation".into()));
    }

    // pass 2: gradient. d value / d g_a collects softmax-weighted kernel
    // derivatives from the terms where a appears as i and as a stratum member.
    let scale = 1.0 / (n * m) as f64;
    let grad: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|a| {
            let yz = &strata.yz_members[strata.yz_of[a]];
            let yy = &strata.y_members[strata.y_of[a]];
            let mut g = 0.0;
            for (j, &eps) in noise.draws.iter().enumerate() {
                // a as i, numerator stratum
                let mut s = 0.0;
                for &l in yz {
                    let x = eps + scores[a] - scores[l];
                    s += (-x) * inv_tau2 * (-x * x * inv_2tau2 - rows[a].0[j]).exp();
                }
                g += s;
                // a as l in other rows of its (y, z) stratum
                let mut s = 0.0;
                for &i in yz {
                    let x = eps + scores[i] - scores[a];
                    s += (-x) * inv_tau2 * (-x * x * inv_2tau2 - rows[i].0[j]).exp();
                }
                g -= s;
                // denominator stratum, signs flipped
                let mut s = 0.0;
                for &k in yy {
                    let x = eps + scores[a] - scores[k];
                    s += (-x) * inv_tau2 * (-x * x * inv_2tau2 - rows[a].1[j]).exp();
                }
                g -= s;
                let mut s = 0.0;
                for &i in yy {
                    let x = eps + scores[i] - scores[a];
                    s += (-x) * inv_tau2 * (-x * x * inv_2tau2 - rows[i].1[j]).exp();
                }
                g += s;
            }
            g * scale
        })
        .collect();

    Ok((value, grad))
}

/// The EO fairness regularizer: the kernel CMI summed over the evaluation
/// time points, with labels Y_t computed from the (possibly augmented)
/// times and events. The noise draws are shared across all t.
pub fn eo_regularizer_raw(
    scores: &[f64],
    times: &[f64],
    events: &[u8],
    z: &[usize],
    eval_times: &[f64],
    noise: &NoiseConfig,
) -> Result<(CmiEstimate, Vec<f64>)> {
    if eval_times.is_empty() {
        return Err(Error::Validation(
            "eo_regularizer needs at least one evaluation time".into(),
        ));
    }
    let n = scores.len();
    let mut per_time = Vec::with_capacity(eval_times.len());
    let mut grad = vec![0.0; n];
    for &t in eval_times {
        let y_t: Vec<u8> = (0..n)
            .map(|i| u8::from(times[i] <= t && events[i] == 1))
            .collect();
        let (v, g) = cmi_approx(scores, &y_t, z, noise)?;
        per_time.push(v);
        for (acc, gi) in grad.iter_mut().zip(&g) {
            *acc += gi;
        }
    }
    let total = per_time.iter().sum();
    Ok((CmiEstimate { per_time, total }, grad))
}

/// Convenience wrapper over a dataset's own times, events, groups, and Q.
pub fn eo_regularizer(
    scores: &[f64],
    ds: &SurvivalDataset,
    noise: &NoiseConfig,
) -> Result<(CmiEstimate, Vec<f64>)> {
    eo_regularizer_raw(
        scores,
        &ds.times(),
        &ds.events(),
        &ds.groups(),
        &ds.eval_times,
        noise,
    )
}
