//! Foundational survival objectives with analytic gradients, the Breslow
//! baseline cumulative hazard, and survival-probability prediction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cumulative baseline hazard as a right-continuous step function over
/// distinct event times. Held constant beyond the last step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineHazard {
    pub times: Vec<f64>,
    pub cumhaz: Vec<f64>,
}

impl BaselineHazard {
    pub fn eval(&self, t: f64) -> f64 {
        // rightmost step time <= t
        match self.times.partition_point(|u| *u <= t) {
            0 => 0.0,
            k => self.cumhaz[k - 1],
        }
    }
}

/// Per-event-time risk-set statistics shared by the Cox loss and the Breslow
/// estimator. Risk sets use the convention R_i = { j : T_j >= T_i } with tied
/// event times pooled.
struct RiskBlocks {
    /// observation indices sorted by time ascending
    order: Vec<usize>,
    /// (time, event count, log sum_{T_j >= time} exp(g_j)) per distinct event time, ascending
    blocks: Vec<(f64, usize, f64)>,
    max_score: f64,
}

fn risk_blocks(scores: &[f64], times: &[f64], events: &[u8]) -> RiskBlocks {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| times[a].partial_cmp(&times[b]).unwrap());

    let max_g = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // suffix sums of exp(g - max) over the ascending order, by tie block
    let mut blocks = Vec::new();
    let mut suffix = 0.0;
    let mut i = n;
    let mut pending: Vec<(f64, usize, f64)> = Vec::new();
    while i > 0 {
        // find the tie block ending at i (exclusive)
        let t = times[order[i - 1]];
        let mut start = i;
        while start > 0 && times[order[start - 1]] == t {
            start -= 1;
        }
        let mut d = 0usize;
        for &idx in &order[start..i] {
            suffix += (scores[idx] - max_g).exp();
            if events[idx] == 1 {
                d += 1;
            }
        }
        if d > 0 {
            pending.push((t, d, max_g + suffix.ln()));
        }
        i = start;
    }
    pending.reverse();
    blocks.extend(pending);
    RiskBlocks {
        order,
        blocks,
        max_score: max_g,
    }
}

/// Negative Cox log partial likelihood with Breslow tie handling:
/// sum over events i of [ -g_i + log sum_{T_j >= T_i} exp(g_j) ],
/// plus the analytic gradient with respect to the scores.
pub fn cox_loss(scores: &[f64], times: &[f64], events: &[u8]) -> Result<(f64, Vec<f64>)> {
    let n = scores.len();
    if times.len() != n || events.len() != n {
        return Err(Error::Shape("scores/times/events length mismatch".into()));
    }
    if !events.iter().any(|&e| e == 1) {
        return Err(Error::Validation(
            "Cox objective undefined: no uncensored observation".into(),
        ));
    }
    let rb = risk_blocks(scores, times, events);

    let mut loss = 0.0;
    for (&g, &e) in scores.iter().zip(events) {
        if e == 1 {
            loss -= g;
        }
    }
    for &(_, d, log_s) in &rb.blocks {
        loss += d as f64 * log_s;
    }

    // grad_k = -delta_k + exp(g_k) * sum_{event blocks with time <= T_k} d / S
    let mut grad = vec![0.0; n];
    let mut cum = 0.0;
    let mut bi = 0;
    for &k in &rb.order {
        while bi < rb.blocks.len() && rb.blocks[bi].0 <= times[k] {
            let (_, d, log_s) = rb.blocks[bi];
            cum += d as f64 * (rb.max_score - log_s).exp();
            bi += 1;
        }
        grad[k] = -f64::from(events[k]) + (scores[k] - rb.max_score).exp() * cum;
    }
    Ok((loss, grad))
}

/// Weibull AFT negative log likelihood:
/// sum_i [ delta_i (log sigma - w_i) + exp(w_i) ], w_i = (log T_i - g_i) / sigma,
/// with analytic gradients for the scores and for log sigma.
pub fn aft_loss(
    scores: &[f64],
    log_sigma: f64,
    times: &[f64],
    events: &[u8],
) -> Result<(f64, Vec<f64>, f64)> {
    let n = scores.len();
    if times.len() != n || events.len() != n {
        return Err(Error::Shape("scores/times/events length mismatch".into()));
    }
    let sigma = log_sigma.exp();
    let mut loss = 0.0;
    let mut grad = vec![0.0; n];
    let mut grad_log_sigma = 0.0;
    for i in 0..n {
        let w = (times[i].ln() - scores[i]) / sigma;
        let ew = w.exp();
        if !w.is_finite() || !ew.is_finite() {
            return Err(Error::Numeric(format!(
                "AFT residual overflow at observation {i} (w = {w})"
            )));
        }
        let d = f64::from(events[i]);
        loss += d * (log_sigma - w) + ew;
        // dL/dw = -delta + exp(w); dw/dg = -1/sigma; sigma * dL/dsigma per chain rule
        let dl_dw = -d + ew;
        grad[i] = -dl_dw / sigma;
        grad_log_sigma += d - dl_dw * w;
    }
    Ok((loss, grad, grad_log_sigma))
}

/// Gradient of the AFT loss with respect to each observed time, used by the
/// augmentation duration updates: dL/dT_i = (-delta_i + exp(w_i)) / (sigma T_i).
pub fn aft_time_grad(scores: &[f64], log_sigma: f64, times: &[f64], events: &[u8]) -> Vec<f64> {
    let sigma = log_sigma.exp();
    (0..scores.len())
        .map(|i| {
            let w = (times[i].ln() - scores[i]) / sigma;
            (-f64::from(events[i]) + w.exp()) / (sigma * times[i])
        })
        .collect()
}

/// Breslow cumulative baseline hazard:
/// Lambda_0(t) = sum over event times u <= t of d_u / sum_{T_j >= u} exp(g_j).
pub fn breslow_baseline(scores: &[f64], times: &[f64], events: &[u8]) -> Result<BaselineHazard> {
    if !events.iter().any(|&e| e == 1) {
        return Err(Error::Validation(
            "Breslow estimator undefined: no uncensored observation".into(),
        ));
    }
    let rb = risk_blocks(scores, times, events);
    let mut out_times = Vec::with_capacity(rb.blocks.len());
    let mut cumhaz = Vec::with_capacity(rb.blocks.len());
    let mut cum = 0.0;
    for &(t, d, log_s) in &rb.blocks {
        cum += d as f64 * (-log_s).exp();
        out_times.push(t);
        cumhaz.push(cum);
    }
    Ok(BaselineHazard {
        times: out_times,
        cumhaz,
    })
}

/// Cox survival probability S(t|X) = exp(-Lambda_0(t) * exp(g)).
pub fn survival_cox(base: &BaselineHazard, g: f64, t: f64) -> f64 {
    (-base.eval(t) * g.exp()).exp()
}

/// Weibull AFT survival probability S(t|X) = exp(-(t / exp(g))^(1/sigma)).
pub fn survival_aft(g: f64, sigma: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    (-(t / g.exp()).powf(1.0 / sigma)).exp()
}
