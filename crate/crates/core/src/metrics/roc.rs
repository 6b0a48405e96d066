use serde::{Deserialize, Serialize};

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::explainer::Explainer;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Rows with `score >= threshold` are called positive; `None` stands for +infinity.
    pub threshold: Option<f64>,
}

/// ROC curve at a single time, ordered by decreasing threshold from (0,0) to (1,1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub time: f64,
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    /// Trapezoid area under the curve.
    pub fn auc(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| 0.5 * (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr))
            .sum()
    }
}

/// ROC curve at time `t` treating `scores` as the classifier output.
///
/// Rows censored before `t` (or at `t`) are excluded; positives are events at or
/// before `t`, negatives are subjects with `t_i > t`.
pub fn roc_from_scores(times: &[f64], events: &[bool], t: f64, scores: &[f64]) -> Result<RocCurve> {
    let mut labelled: Vec<(f64, bool)> = Vec::new();
    for i in 0..times.len() {
        if times[i] <= t && events[i] {
            labelled.push((scores[i], true));
        } else if times[i] > t {
            labelled.push((scores[i], false));
        }
    }
    let n_pos = labelled.iter().filter(|(_, p)| *p).count();
    let n_neg = labelled.len() - n_pos;
    if n_pos == 0 {
        return Err(Error::Undefined(format!(
            "ROC at t={t}: no positives (events at or before t)"
        )));
    }
    if n_neg == 0 {
        return Err(Error::Undefined(format!(
            "ROC at t={t}: no negatives (subjects at risk beyond t)"
        )));
    }
    labelled.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: None,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut k = 0;
    while k < labelled.len() {
        let threshold = labelled[k].0;
        while k < labelled.len() && labelled[k].0 == threshold {
            if labelled[k].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / n_neg as f64,
            tpr: tp as f64 / n_pos as f64,
            threshold: Some(threshold),
        });
    }
    Ok(RocCurve { time: t, points })
}

/// ROC curve at `t` with score `1 - S(t | x_i)` from the explainer's grid prediction.
pub fn roc_at_time(explainer: &Explainer, eval_data: &SurvivalDataset, t: f64) -> Result<RocCurve> {
    if !t.is_finite() {
        return Err(Error::input(format!("ROC time must be finite, got {t}")));
    }
    let grid = explainer.grid().points();
    let k = grid.partition_point(|s| *s <= t);
    let scores = eval_data
        .features()
        .rows()
        .map(|x| {
            let s = if k == 0 {
                1.0
            } else {
                explainer.survival(x)?[k - 1]
            };
            Ok(1.0 - s)
        })
        .collect::<Result<Vec<f64>>>()?;
    roc_from_scores(eval_data.times(), eval_data.events(), t, &scores)
}
