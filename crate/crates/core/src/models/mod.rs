//! Prediction interface and the built-in reference models.

mod cox;
mod km;
mod weibull;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use cox::{fit_cox, CoxModel, CoxPartialLikelihood};
pub use km::KaplanMeierModel;
pub use weibull::{fit_weibull_aft, WeibullAftModel, WeibullLikelihood};

use crate::curve::{CurveKind, StepCurve};
use crate::data::TimeGrid;
use crate::error::{Error, Result};

/// Anything that can produce a survival function for a feature vector.
///
/// Implementations must be safe to call concurrently from several threads.
pub trait SurvivalModel: Send + Sync {
    /// Survival probabilities at `times` for features `x`.
    fn survival(&self, x: &[f64], times: &[f64]) -> Vec<f64>;

    /// Expected feature count, or `None` when the model accepts any length.
    fn n_features(&self) -> Option<usize> {
        None
    }

    /// Optional native risk score overriding the default grid-sum of cumulative hazard.
    fn risk(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    fn label(&self) -> String {
        "model".to_string()
    }
}

/// Survival curve of `model` for `x` over `grid`, clamped to [0, 1].
pub fn predict_survival(
    model: &dyn SurvivalModel,
    x: &[f64],
    grid: &TimeGrid,
) -> Result<StepCurve> {
    check_dimension(model, x)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("feature vector contains non-finite values"));
    }
    let values: Vec<f64> = model
        .survival(x, grid.points())
        .into_iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    StepCurve::new(grid.points().to_vec(), values, CurveKind::Survival)
}

pub(crate) fn check_dimension(model: &dyn SurvivalModel, x: &[f64]) -> Result<()> {
    match model.n_features() {
        Some(p) if p != x.len() => Err(Error::input(format!(
            "feature vector has length {}, model expects {p}",
            x.len()
        ))),
        _ => Ok(()),
    }
}

/// Wraps a user-supplied prediction function `(x, times) -> survival values`.
pub struct FnModel<F> {
    func: F,
    n_features: Option<usize>,
    label: String,
}

impl<F> FnModel<F>
where
    F: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(label: impl Into<String>, func: F) -> Self {
        Self {
            func,
            n_features: None,
            label: label.into(),
        }
    }

    pub fn with_n_features(mut self, p: usize) -> Self {
        self.n_features = Some(p);
        self
    }
}

impl<F> SurvivalModel for FnModel<F>
where
    F: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync,
{
    fn survival(&self, x: &[f64], times: &[f64]) -> Vec<f64> {
        (self.func)(x, times)
    }

    fn n_features(&self) -> Option<usize> {
        self.n_features
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

impl<F> fmt::Debug for FnModel<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnModel")
            .field("label", &self.label)
            .field("n_features", &self.n_features)
            .finish()
    }
}

/// One of the fitted built-in models; serializable for model dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ReferenceModel {
    Km(KaplanMeierModel),
    Cox(CoxModel),
    WeibullAft(WeibullAftModel),
}

impl SurvivalModel for ReferenceModel {
    fn survival(&self, x: &[f64], times: &[f64]) -> Vec<f64> {
        match self {
            ReferenceModel::Km(m) => m.survival(x, times),
            ReferenceModel::Cox(m) => m.survival(x, times),
            ReferenceModel::WeibullAft(m) => m.survival(x, times),
        }
    }

    fn n_features(&self) -> Option<usize> {
        match self {
            ReferenceModel::Km(m) => m.n_features(),
            ReferenceModel::Cox(m) => m.n_features(),
            ReferenceModel::WeibullAft(m) => m.n_features(),
        }
    }

    fn label(&self) -> String {
        match self {
            ReferenceModel::Km(m) => m.label(),
            ReferenceModel::Cox(m) => m.label(),
            ReferenceModel::WeibullAft(m) => m.label(),
        }
    }
}

/// Columns whose values are all identical; such columns carry no information for fitting.
pub(crate) fn constant_columns(features: &crate::data::Matrix) -> Vec<bool> {
    (0..features.n_cols())
        .map(|j| {
            let first = features.get(0, j);
            (0..features.n_rows()).all(|i| features.get(i, j) == first)
        })
        .collect()
}
