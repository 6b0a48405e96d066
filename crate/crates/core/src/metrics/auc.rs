use super::MetricCurve;
use crate::curve::StepCurve;
use crate::data::{SurvivalDataset, TimeGrid};
use crate::error::{Error, Result};
use crate::estimators::censoring_km;
use crate::explainer::Explainer;

fn concordant(a: f64, b: f64) -> f64 {
    if a > b {
        1.0
    } else if a == b {
        0.5
    } else {
        0.0
    }
}

/// Cumulative/dynamic AUC at each grid point from risk scores.
///
/// Cases are events at or before `t`, weighted by `1 / G(t_i-)^2`; controls are subjects
/// with `t_j > t`. Ties in risk count one half.
pub fn cd_auc_from_scores(
    times: &[f64],
    events: &[bool],
    censoring: &StepCurve,
    grid: &[f64],
    risk: &[f64],
) -> Vec<Option<f64>> {
    let weights: Vec<f64> = times
        .iter()
        .map(|t| {
            let g = censoring.eval_left(*t);
            if g > 0.0 {
                1.0 / (g * g)
            } else {
                0.0
            }
        })
        .collect();
    grid.iter()
        .map(|&t| {
            let cases: Vec<usize> = (0..times.len())
                .filter(|&i| times[i] <= t && events[i] && weights[i] > 0.0)
                .collect();
            let controls: Vec<usize> = (0..times.len()).filter(|&j| times[j] > t).collect();
            if cases.is_empty() || controls.is_empty() {
                return None;
            }
            let mut num = 0.0;
            let mut case_weight = 0.0;
            for &i in &cases {
                let hits: f64 = controls.iter().map(|&j| concordant(risk[i], risk[j])).sum();
                num += weights[i] * hits;
                case_weight += weights[i];
            }
            Some(num / (case_weight * controls.len() as f64))
        })
        .collect()
}

/// Cumulative/dynamic AUC of the explainer's risk output on `eval_data`.
pub fn cd_auc(
    explainer: &Explainer,
    eval_data: &SurvivalDataset,
    grid: &TimeGrid,
) -> Result<MetricCurve> {
    let censoring = censoring_km(eval_data)?;
    let risk = risk_scores(explainer, eval_data)?;
    let values = cd_auc_from_scores(
        eval_data.times(),
        eval_data.events(),
        &censoring,
        grid.points(),
        &risk,
    );
    Ok(MetricCurve::integrate("cd_auc", grid, values))
}

/// Harrell's concordance index from risk scores.
pub fn concordance_from_scores(times: &[f64], events: &[bool], risk: &[f64]) -> Result<f64> {
    let mut pairs = 0usize;
    let mut score = 0.0;
    for i in (0..times.len()).filter(|&i| events[i]) {
        for j in 0..times.len() {
            if times[i] < times[j] {
                pairs += 1;
                score += concordant(risk[i], risk[j]);
            }
        }
    }
    if pairs == 0 {
        return Err(Error::Undefined(
            "concordance index has no comparable pairs".into(),
        ));
    }
    Ok(score / pairs as f64)
}

/// Harrell's C of the explainer's risk output on `eval_data`.
pub fn concordance_index(explainer: &Explainer, eval_data: &SurvivalDataset) -> Result<f64> {
    let risk = risk_scores(explainer, eval_data)?;
    concordance_from_scores(eval_data.times(), eval_data.events(), &risk)
}

pub(crate) fn risk_scores(explainer: &Explainer, data: &SurvivalDataset) -> Result<Vec<f64>> {
    data.features().rows().map(|x| explainer.risk(x)).collect()
}
