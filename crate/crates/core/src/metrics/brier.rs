use super::MetricCurve;
use crate::curve::StepCurve;
use crate::data::{SurvivalDataset, TimeGrid};
use crate::error::Result;
use crate::estimators::censoring_km;
use crate::explainer::Explainer;

/// IPCW Brier score at each grid point from precomputed predictions.
///
/// `survival[i][k]` is the predicted survival of observation `i` at `grid[k]`. Events
/// at or before `t` are weighted by `1 / G(t_i-)`, subjects still at risk by `1 / G(t)`,
/// and subjects censored before `t` contribute zero. Terms with a zero weight
/// denominator are dropped together with their share of `n`.
pub fn brier_from_predictions(
    times: &[f64],
    events: &[bool],
    censoring: &StepCurve,
    grid: &[f64],
    survival: &[Vec<f64>],
) -> Vec<Option<f64>> {
    grid.iter()
        .enumerate()
        .map(|(k, &t)| {
            let g_t = censoring.eval(t);
            let mut sum = 0.0;
            let mut n = 0usize;
            for i in 0..times.len() {
                let s = survival[i][k];
                if times[i] <= t && events[i] {
                    let g = censoring.eval_left(times[i]);
                    if g > 0.0 {
                        sum += s * s / g;
                        n += 1;
                    }
                } else if times[i] > t {
                    if g_t > 0.0 {
                        sum += (1.0 - s) * (1.0 - s) / g_t;
                        n += 1;
                    }
                } else {
                    n += 1;
                }
            }
            (n > 0).then(|| sum / n as f64)
        })
        .collect()
}

/// Time-dependent Brier score of the explainer's model on `eval_data`.
pub fn brier_score(
    explainer: &Explainer,
    eval_data: &SurvivalDataset,
    grid: &TimeGrid,
) -> Result<MetricCurve> {
    let censoring = censoring_km(eval_data)?;
    let survival = eval_data
        .features()
        .rows()
        .map(|x| explainer.survival_at(x, grid.points()))
        .collect::<Result<Vec<_>>>()?;
    let values = brier_from_predictions(
        eval_data.times(),
        eval_data.events(),
        &censoring,
        grid.points(),
        &survival,
    );
    Ok(MetricCurve::integrate("brier_score", grid, values))
}
