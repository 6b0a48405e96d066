use serde::{Deserialize, Serialize};

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::explainer::Explainer;

/// Cox-Snell, martingale and deviance residuals of one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSet {
    pub cox_snell: Vec<f64>,
    pub martingale: Vec<f64>,
    /// `None` for an event whose predicted cumulative hazard is zero.
    pub deviance: Vec<Option<f64>>,
    pub observed_times: Vec<f64>,
    pub events: Vec<bool>,
}

/// Residuals from the explainer's cumulative hazard at each observed time.
///
/// The hazard is read off the explainer grid by step interpolation. Deviance uses the
/// convention `0 * ln(0) = 0` for censored rows.
pub fn model_diagnostics(explainer: &Explainer, data: &SurvivalDataset) -> Result<ResidualSet> {
    if data.n_features() != explainer.n_features() {
        return Err(Error::input(format!(
            "dataset has {} features, explainer expects {}",
            data.n_features(),
            explainer.n_features()
        )));
    }
    let grid = explainer.grid().points();
    let n = data.n_rows();
    let mut cox_snell = Vec::with_capacity(n);
    let mut martingale = Vec::with_capacity(n);
    let mut deviance = Vec::with_capacity(n);
    for (i, x) in data.features().rows().enumerate() {
        let t = data.times()[i];
        let k = grid.partition_point(|s| *s <= t);
        let h = if k == 0 {
            0.0
        } else {
            explainer.chf(x)?[k - 1]
        };
        let delta = if data.events()[i] { 1.0 } else { 0.0 };
        let m = delta - h;
        cox_snell.push(h);
        martingale.push(m);
        deviance.push(deviance_residual(m, data.events()[i]));
    }
    Ok(ResidualSet {
        cox_snell,
        martingale,
        deviance,
        observed_times: data.times().to_vec(),
        events: data.events().to_vec(),
    })
}

fn deviance_residual(martingale: f64, event: bool) -> Option<f64> {
    let log_term = if event {
        let h = 1.0 - martingale;
        if h <= 0.0 {
            return None;
        }
        h.ln()
    } else {
        0.0
    };
    let inner = (-2.0 * (martingale + log_term)).max(0.0);
    let sign = if martingale > 0.0 {
        1.0
    } else if martingale < 0.0 {
        -1.0
    } else {
        0.0
    };
    Some(sign * inner.sqrt())
}
