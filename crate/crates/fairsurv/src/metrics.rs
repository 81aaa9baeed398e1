//! Accuracy and equalized-odds fairness metrics at the pre-defined
//! evaluation time points, plus the radar utility transform and report
//! serialization.

use serde::{Deserialize, Serialize};

use crate::dataset::SurvivalDataset;
use crate::error::{Error, Result};
use crate::train::TrainedModel;

/// One observation's prediction at a fixed time point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PredictionAtT {
    pub survival_prob: f64,
    pub label: u8,
    pub truth: u8,
    pub group: usize,
}

/// Groupwise rate; undefined when the conditioning cell is empty.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GroupRates {
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimePointMetrics {
    pub t: f64,
    /// None when only one class is present at t (skipped and flagged).
    pub auc: Option<f64>,
    pub brier: f64,
    pub group_rates: Vec<GroupRates>,
    pub dtpr: Option<f64>,
    pub dfpr: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadarUtilities {
    pub u_auc: f64,
    pub u_brier: f64,
    pub u_dtpr: f64,
    pub u_dfpr: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub dataset: String,
    pub scenario: String,
    pub method: String,
    pub seed: u64,
    pub per_time: Vec<TimePointMetrics>,
    pub aauc: f64,
    pub abrier: f64,
    pub adtpr: f64,
    pub adfpr: f64,
    pub radar: RadarUtilities,
    /// time points skipped for AUC or disparity, for the run log
    pub flags: Vec<String>,
}

/// Predicted label 1 iff S(t|X) < 0.5, strictly; truth is Y_t.
pub fn predict_labels(
    survival_probs: &[f64],
    ds: &SurvivalDataset,
    t: f64,
) -> Result<Vec<PredictionAtT>> {
    if survival_probs.len() != ds.len() {
        return Err(Error::Shape("survival_probs length mismatch".into()));
    }
    survival_probs
        .iter()
        .zip(&ds.observations)
        .map(|(&s, obs)| {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::Numeric(format!(
                    "survival probability {s} outside [0,1]"
                )));
            }
            Ok(PredictionAtT {
                survival_prob: s,
                label: u8::from(s < 0.5),
                truth: crate::dataset::event_label(obs, t),
                group: obs.group,
            })
        })
        .collect()
}

/// Mann-Whitney AUC with ties counted 1/2. None when a class is missing.
pub fn auc_at(risks: &[f64], truths: &[u8]) -> Option<f64> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (&r, &y) in risks.iter().zip(truths) {
        if y == 1 {
            pos.push(r);
        } else {
            neg.push(r);
        }
    }
    if pos.is_empty() || neg.is_empty() {
        return None;
    }
    let mut concordant = 0.0;
    for &p in &pos {
        for &q in &neg {
            concordant += if p > q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    Some(concordant / (pos.len() * neg.len()) as f64)
}

/// BS_t = (1/n) sum_i (I(T_i > t) - S(t|X_i))^2.
pub fn brier_at(survival_probs: &[f64], ds: &SurvivalDataset, t: f64) -> f64 {
    let n = ds.len() as f64;
    survival_probs
        .iter()
        .zip(&ds.observations)
        .map(|(&s, obs)| {
            let indicator = f64::from(obs.time > t);
            (indicator - s).powi(2)
        })
        .sum::<f64>()
        / n
}

/// Empirical per-group TPR/FPR; empty conditionals yield None.
pub fn group_rates(preds: &[PredictionAtT], n_groups: usize) -> Vec<GroupRates> {
    let mut tp = vec![0usize; n_groups];
    let mut pos = vec![0usize; n_groups];
    let mut fp = vec![0usize; n_groups];
    let mut neg = vec![0usize; n_groups];
    for p in preds {
        if p.truth == 1 {
            pos[p.group] += 1;
            tp[p.group] += usize::from(p.label == 1);
        } else {
            neg[p.group] += 1;
            fp[p.group] += usize::from(p.label == 1);
        }
    }
    (0..n_groups)
        .map(|c| GroupRates {
            tpr: (pos[c] > 0).then(|| tp[c] as f64 / pos[c] as f64),
            fpr: (neg[c] > 0).then(|| fp[c] as f64 / neg[c] as f64),
        })
        .collect()
}

/// max - min over groups with a defined rate; None when fewer than two
/// groups are defined.
fn rate_spread(rates: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = rates.flatten().collect();
    if defined.len() < 2 {
        return None;
    }
    let max = defined.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = defined.iter().cloned().fold(f64::INFINITY, f64::min);
    Some(max - min)
}

/// adTPR/adFPR: means of the per-time max-min gaps over the usable time
/// points.
pub fn disparity(per_time: &[TimePointMetrics]) -> Result<(f64, f64)> {
    let dtprs: Vec<f64> = per_time.iter().filter_map(|m| m.dtpr).collect();
    let dfprs: Vec<f64> = per_time.iter().filter_map(|m| m.dfpr).collect();
    if dtprs.is_empty() && dfprs.is_empty() {
        return Err(Error::Validation(
            "disparity undefined: no time point has two groups with defined rates".into(),
        ));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    Ok((mean(&dtprs), mean(&dfprs)))
}

/// The literal radar transform: U_AUC = 0.5 + 2 aAUC, U_Brier = 0.5 - aBrier,
/// U_dtpr = -adTPR, U_dfpr = -adFPR.
pub fn radar_utilities(aauc: f64, abrier: f64, adtpr: f64, adfpr: f64) -> RadarUtilities {
    RadarUtilities {
        u_auc: 0.5 + 2.0 * aauc,
        u_brier: 0.5 - abrier,
        u_dtpr: -adtpr,
        u_dfpr: -adfpr,
    }
}

/// Full evaluation of a trained model on a dataset (normally the test split).
pub fn evaluate(
    trained: &TrainedModel,
    ds: &SurvivalDataset,
    dataset_name: &str,
    seed: u64,
) -> Result<MetricReport> {
    if ds.is_empty() {
        return Err(Error::Validation("cannot evaluate on an empty dataset".into()));
    }
    let mut per_time = Vec::with_capacity(ds.eval_times.len());
    let mut flags = Vec::new();
    for &t in &ds.eval_times {
        let survival_probs: Vec<f64> = ds
            .observations
            .iter()
            .map(|o| trained.survival(&o.features, t))
            .collect::<Result<_>>()?;
        let preds = predict_labels(&survival_probs, ds, t)?;
        let risks: Vec<f64> = survival_probs.iter().map(|s| 1.0 - s).collect();
        let truths: Vec<u8> = preds.iter().map(|p| p.truth).collect();
        let auc = auc_at(&risks, &truths);
        if auc.is_none() {
            flags.push(format!("t={t}: single-class, AUC skipped"));
        }
        let brier = brier_at(&survival_probs, ds, t);
        let rates = group_rates(&preds, ds.n_groups());
        let dtpr = rate_spread(rates.iter().map(|r| r.tpr));
        let dfpr = rate_spread(rates.iter().map(|r| r.fpr));
        if dtpr.is_none() || dfpr.is_none() {
            flags.push(format!("t={t}: undefined group rates excluded"));
        }
        per_time.push(TimePointMetrics {
            t,
            auc,
            brier,
            group_rates: rates,
            dtpr,
            dfpr,
        });
    }

    let aucs: Vec<f64> = per_time.iter().filter_map(|m| m.auc).collect();
    let aauc = if aucs.is_empty() {
        f64::NAN
    } else {
        aucs.iter().sum::<f64>() / aucs.len() as f64
    };
    let abrier = per_time.iter().map(|m| m.brier).sum::<f64>() / per_time.len() as f64;
    let (adtpr, adfpr) = disparity(&per_time)?;

    Ok(MetricReport {
        dataset: dataset_name.to_string(),
        scenario: format!("{:?}", trained.scenario),
        method: format!("{:?}", trained.method),
        seed,
        per_time,
        aauc,
        abrier,
        adtpr,
        adfpr,
        radar: radar_utilities(aauc, abrier, adtpr, adfpr),
        flags,
    })
}

/// Flat CSV header matching the benchmark table layout.
pub const CSV_HEADER: &str = "dataset,scenario,method,seed,aAUC,aBrier,adTPR,adFPR";

impl MetricReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.dataset,
            self.scenario,
            self.method,
            self.seed,
            self.aauc,
            self.abrier,
            self.adtpr,
            self.adfpr
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Observation;

    fn ds_with(times_events_groups: &[(f64, u8, usize)]) -> SurvivalDataset {
        let observations = times_events_groups
            .iter()
            .map(|&(time, event, group)| Observation {
                features: vec![0.0],
                time,
                event,
                group,
            })
            .collect();
        SurvivalDataset::new(
            observations,
            vec!["x".into()],
            vec!["a".into(), "b".into()],
            vec![5.0],
        )
        .unwrap()
    }

    #[test]
    fn label_threshold_is_strict() {
        let ds = ds_with(&[(1.0, 1, 0), (1.0, 1, 0), (1.0, 1, 0)]);
        let preds = predict_labels(&[0.3, 0.7, 0.5], &ds, 5.0).unwrap();
        assert_eq!(preds[0].label, 1);
        assert_eq!(preds[1].label, 0);
        assert_eq!(preds[2].label, 0);
    }

    #[test]
    fn survival_prob_contract_enforced() {
        let ds = ds_with(&[(1.0, 1, 0)]);
        assert!(predict_labels(&[1.2], &ds, 5.0).is_err());
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc_at(&[0.9, 0.1], &[1, 0]), Some(1.0));
        assert_eq!(auc_at(&[0.4, 0.4, 0.4], &[1, 0, 1]), Some(0.5));
        let v = auc_at(&[0.9, 0.4, 0.6, 0.1], &[1, 1, 0, 0]).unwrap();
        assert!((v - 0.75).abs() < 1e-12);
        assert_eq!(auc_at(&[0.5, 0.6], &[1, 1]), None);
    }

    #[test]
    fn auc_invariant_under_monotone_transform() {
        let risks = [0.1, 0.5, 0.3, 0.9, 0.7];
        let truths = [0, 1, 0, 1, 1];
        let a = auc_at(&risks, &truths).unwrap();
        let transformed: Vec<f64> = risks.iter().map(|r| (5.0 * r).exp()).collect();
        let b = auc_at(&transformed, &truths).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn brier_examples() {
        let ds = ds_with(&[(10.0, 1, 0), (1.0, 1, 0)]);
        // perfect predictions
        assert_eq!(brier_at(&[1.0, 0.0], &ds, 5.0), 0.0);
        // S = 0.5 everywhere
        assert!((brier_at(&[0.5, 0.5], &ds, 5.0) - 0.25).abs() < 1e-12);
        // hand arithmetic: indicators (1, 0), S = (0.8, 0.4)
        assert!((brier_at(&[0.8, 0.4], &ds, 5.0) - 0.10).abs() < 1e-12);
    }

    #[test]
    fn group_rate_counting() {
        let preds = [
            PredictionAtT { survival_prob: 0.2, label: 1, truth: 1, group: 1 },
            PredictionAtT { survival_prob: 0.8, label: 0, truth: 1, group: 1 },
        ];
        let rates = group_rates(&preds, 2);
        assert_eq!(rates[1].tpr, Some(0.5));
        // no positives in group 0
        assert_eq!(rates[0].tpr, None);
        // no negatives anywhere
        assert_eq!(rates[1].fpr, None);
    }

    #[test]
    fn disparity_examples() {
        let mk = |dtpr, dfpr| TimePointMetrics {
            t: 1.0,
            auc: Some(0.5),
            brier: 0.2,
            group_rates: vec![],
            dtpr,
            dfpr,
        };
        let (adtpr, _) = disparity(&[mk(Some(0.3), Some(0.0))]).unwrap();
        assert!((adtpr - 0.3).abs() < 1e-12);
        // three groups {0.2, 0.9, 0.5} -> 0.7 is the caller's spread; check
        // rate_spread directly
        let spread = rate_spread([Some(0.2), Some(0.9), Some(0.5)].into_iter()).unwrap();
        assert!((spread - 0.7).abs() < 1e-12);
        assert!(disparity(&[mk(None, None)]).is_err());
    }

    #[test]
    fn radar_transform_literal() {
        let u = radar_utilities(0.5, 0.25, 0.0, 0.1);
        assert!((u.u_auc - 1.5).abs() < 1e-12);
        assert!((u.u_brier - 0.25).abs() < 1e-12);
        assert_eq!(u.u_dtpr, 0.0);
        assert!((u.u_dfpr + 0.1).abs() < 1e-12);
    }
}
