//! Time-dependent and scalar performance measures.
//!
//! Censoring is handled by inverse probability of censoring weights, with the censoring
//! survival function `G` estimated by Kaplan-Meier on the evaluation data. Points where a
//! metric cannot be computed are reported as `None` and skipped when integrating.

mod auc;
mod brier;
mod loss;
mod roc;

use serde::{Deserialize, Serialize};

use crate::data::TimeGrid;
use crate::stats::normalized_trapezoid;

pub use auc::{cd_auc, cd_auc_from_scores, concordance_from_scores, concordance_index};
pub use brier::{brier_from_predictions, brier_score};
pub use loss::{loss_adapter, Loss, LossKind, LossValue};
pub use roc::{roc_at_time, roc_from_scores, RocCurve, RocPoint};

/// A metric evaluated over a time grid, with its normalized integral when defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCurve {
    pub metric: String,
    pub grid: TimeGrid,
    pub values: Vec<Option<f64>>,
    pub integrated: Option<f64>,
}

impl MetricCurve {
    pub(crate) fn integrate(metric: &str, grid: &TimeGrid, values: Vec<Option<f64>>) -> Self {
        let integrated = normalized_trapezoid(grid.points(), &values);
        Self {
            metric: metric.to_string(),
            grid: grid.clone(),
            values,
            integrated,
        }
    }
}
