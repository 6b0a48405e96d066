//! The explainer: a wrapped model, its background data and a shared time grid.
//!
//! Every explanation and metric in this crate takes an [`Explainer`]. It converts the
//! model's survival predictions into the three supported output types:
//!
//! * `survival` - the raw curve `S(t | x)` on the grid,
//! * `chf` - `H(t | x) = -ln(clamp(S, 1e-18, 1))` pointwise,
//! * `risk` - a single number per row, the sum of `H(t_k | x)` over the grid points.
//!
//! The risk convention is implementation-defined: any strictly increasing functional of
//! the cumulative hazard would give the same orderings, which is all the rank-based
//! metrics use. A model may supply its own risk via [`SurvivalModel::risk`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::{chf_from_survival, validate_values, CurveKind, StepCurve};
use crate::data::{Matrix, SurvivalDataset, TimeGrid};
use crate::error::{Error, Result};
use crate::models::{check_dimension, SurvivalModel};
use crate::stats::quantile_sorted;

/// Maximum number of points in a grid derived from the background data.
pub const MAX_DEFAULT_GRID: usize = 51;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputType {
    Survival,
    Chf,
    Risk,
}

impl FromStr for OutputType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "survival" => Ok(OutputType::Survival),
            "chf" => Ok(OutputType::Chf),
            "risk" => Ok(OutputType::Risk),
            other => Err(Error::input(format!(
                "unknown output type '{other}' (expected survival, chf or risk)"
            ))),
        }
    }
}

impl fmt::Display for OutputType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputType::Survival => "survival",
            OutputType::Chf => "chf",
            OutputType::Risk => "risk",
        })
    }
}

/// Batch prediction result.
#[derive(Debug, Clone, PartialEq)]
pub enum Prediction {
    Curves(Vec<StepCurve>),
    Risk(Vec<f64>),
}

#[derive(Clone)]
pub struct Explainer {
    model: Arc<dyn SurvivalModel>,
    background: SurvivalDataset,
    grid: TimeGrid,
    label: String,
}

impl fmt::Debug for Explainer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Explainer")
            .field("label", &self.label)
            .field("n_background", &self.background.n_rows())
            .field("grid", &self.grid)
            .finish()
    }
}

impl Explainer {
    /// Wrap `model`; the grid defaults to one derived from the background event times.
    pub fn new(
        model: impl SurvivalModel + 'static,
        background: SurvivalDataset,
        grid: Option<TimeGrid>,
    ) -> Result<Self> {
        Self::from_arc(Arc::new(model), background, grid)
    }

    pub fn from_arc(
        model: Arc<dyn SurvivalModel>,
        background: SurvivalDataset,
        grid: Option<TimeGrid>,
    ) -> Result<Self> {
        if background.n_rows() < 2 {
            return Err(Error::Construction(
                "background needs at least 2 rows".into(),
            ));
        }
        if background.n_events() == 0 {
            return Err(Error::Construction(
                "background needs at least one event".into(),
            ));
        }
        let grid = match grid {
            Some(g) => g,
            None => default_grid(&background)?,
        };
        let label = model.label();
        let explainer = Self {
            model,
            background,
            grid,
            label,
        };
        explainer.probe()?;
        Ok(explainer)
    }

    fn probe(&self) -> Result<()> {
        let x = self.background.features().row(0);
        check_dimension(self.model.as_ref(), x).map_err(|e| Error::Construction(e.to_string()))?;
        let values = self.model.survival(x, self.grid.points());
        if values.len() != self.grid.len() {
            return Err(Error::Construction(format!(
                "prediction has length {}, expected grid length {}",
                values.len(),
                self.grid.len()
            )));
        }
        validate_values(&values, CurveKind::Survival).map_err(|e| match e {
            Error::Input(m) => Error::Construction(m),
            other => other,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn background(&self) -> &SurvivalDataset {
        &self.background
    }

    pub fn model(&self) -> &dyn SurvivalModel {
        self.model.as_ref()
    }

    pub fn n_features(&self) -> usize {
        self.background.n_features()
    }

    fn check_row(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features() {
            return Err(Error::input(format!(
                "feature vector has length {}, explainer expects {}",
                x.len(),
                self.n_features()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("feature vector contains non-finite values"));
        }
        Ok(())
    }

    /// Survival probabilities at arbitrary `times`, clamped to [0, 1].
    pub fn survival_at(&self, x: &[f64], times: &[f64]) -> Result<Vec<f64>> {
        self.check_row(x)?;
        let values = self.model.survival(x, times);
        if values.len() != times.len() {
            return Err(Error::Numeric(format!(
                "model returned {} values for {} times",
                values.len(),
                times.len()
            )));
        }
        Ok(values.into_iter().map(|s| s.clamp(0.0, 1.0)).collect())
    }

    /// Survival probabilities on the explainer grid.
    pub fn survival(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.survival_at(x, self.grid.points())
    }

    /// Cumulative hazard on the explainer grid.
    pub fn chf(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self
            .survival(x)?
            .into_iter()
            .map(chf_from_survival)
            .collect())
    }

    /// Grid-sum of the cumulative hazard, unless the model defines its own risk.
    pub fn risk(&self, x: &[f64]) -> Result<f64> {
        self.check_row(x)?;
        if let Some(r) = self.model.risk(x) {
            return Ok(r);
        }
        Ok(self.chf(x)?.iter().sum())
    }

    /// Prediction in the requested output type: one value per grid point, or a single
    /// value for `risk`.
    pub fn output(&self, x: &[f64], output_type: OutputType) -> Result<Vec<f64>> {
        match output_type {
            OutputType::Survival => self.survival(x),
            OutputType::Chf => self.chf(x),
            OutputType::Risk => Ok(vec![self.risk(x)?]),
        }
    }

    /// Predict every row of `x`; `times` defaults to the explainer grid.
    pub fn predict(
        &self,
        x: &Matrix,
        output_type: OutputType,
        times: Option<&TimeGrid>,
    ) -> Result<Prediction> {
        let grid = times.unwrap_or(&self.grid);
        let mut curves = Vec::with_capacity(x.n_rows());
        let mut risks = Vec::with_capacity(x.n_rows());
        for (i, row) in x.rows().enumerate() {
            let s = self
                .survival_at(row, grid.points())
                .map_err(|e| e.context(format!("row {i}")))?;
            match output_type {
                OutputType::Survival => curves.push(StepCurve::new(
                    grid.points().to_vec(),
                    s,
                    CurveKind::Survival,
                )?),
                OutputType::Chf => {
                    let h = s.into_iter().map(chf_from_survival).collect();
                    curves.push(StepCurve::new(grid.points().to_vec(), h, CurveKind::Chf)?)
                }
                OutputType::Risk => risks.push(match self.model.risk(row) {
                    Some(r) => r,
                    None => s.into_iter().map(chf_from_survival).sum(),
                }),
            }
        }
        Ok(match output_type {
            OutputType::Risk => Prediction::Risk(risks),
            _ => Prediction::Curves(curves),
        })
    }
}

/// Distinct positive event times of `background`, or their 51 evenly spaced quantiles
/// when there are more than 51.
pub fn default_grid(background: &SurvivalDataset) -> Result<TimeGrid> {
    let mut event_times: Vec<f64> = background
        .times()
        .iter()
        .zip(background.events())
        .filter(|(t, e)| **e && **t > 0.0)
        .map(|(t, _)| *t)
        .collect();
    event_times.sort_by(f64::total_cmp);
    let mut unique = event_times.clone();
    unique.dedup();
    let points = if unique.len() <= MAX_DEFAULT_GRID {
        unique
    } else {
        let last = (MAX_DEFAULT_GRID - 1) as f64;
        let mut q: Vec<f64> = (0..MAX_DEFAULT_GRID)
            .map(|k| quantile_sorted(&event_times, k as f64 / last))
            .collect();
        q.dedup();
        q
    };
    if points.len() < 2 {
        return Err(Error::Construction(
            "cannot derive a time grid: fewer than 2 distinct positive event times".into(),
        ));
    }
    TimeGrid::new(points).map_err(|e| Error::Construction(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{FnModel, KaplanMeierModel};

    fn background(times: Vec<f64>) -> SurvivalDataset {
        let n = times.len();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        SurvivalDataset::from_rows(times, vec![true; n], &rows).unwrap()
    }

    #[test]
    fn grid_is_event_times_below_cap() {
        let times: Vec<f64> = (1..=30).map(|t| t as f64).collect();
        let bg = background(times.clone());
        let e = Explainer::new(KaplanMeierModel::fit(&bg).unwrap(), bg, None).unwrap();
        assert_eq!(e.grid().points(), times.as_slice());
    }

    #[test]
    fn grid_is_capped_by_quantiles() {
        let times: Vec<f64> = (1..=500).map(|t| t as f64 * 0.37).collect();
        let bg = background(times);
        let g = default_grid(&bg).unwrap();
        assert_eq!(g.len(), 51);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g.first(), 0.37);
        assert_eq!(g.last(), 500.0 * 0.37);
    }

    #[test]
    fn probe_rejects_invalid_survival() {
        let bg = background(vec![1.0, 2.0, 3.0]);
        let model = FnModel::new("const", |_x: &[f64], t: &[f64]| vec![1.2; t.len()]);
        let err = Explainer::new(model, bg.clone(), None).unwrap_err();
        assert!(matches!(err, Error::Construction(_)));
        assert!(err.to_string().contains("survival value out of [0,1]"));

        let short = FnModel::new("short", |_x: &[f64], _t: &[f64]| vec![0.5]);
        let err = Explainer::new(short, bg.clone(), None).unwrap_err();
        assert!(err.to_string().contains("length"));

        let rising = FnModel::new("rising", |_x: &[f64], t: &[f64]| {
            t.iter().map(|v| v / 10.0).collect()
        });
        let err = Explainer::new(rising, bg, None).unwrap_err();
        assert!(err.to_string().contains("nonincreasing"));
    }

    #[test]
    fn background_requirements() {
        let one = SurvivalDataset::from_rows(vec![1.0], vec![true], &[vec![0.0]]).unwrap();
        let km = KaplanMeierModel::fit(&one).unwrap();
        assert!(Explainer::new(km.clone(), one, None).is_err());
        let censored =
            SurvivalDataset::from_rows(vec![1.0, 2.0], vec![false, false], &[vec![0.0], vec![1.0]])
                .unwrap();
        assert!(Explainer::new(km, censored, None).is_err());
    }

    #[test]
    fn output_types() {
        let bg = background((1..=51).map(|t| t as f64).collect());
        let e_inv = (-1.0_f64).exp();
        let model = FnModel::new("flat", move |_x: &[f64], t: &[f64]| vec![e_inv; t.len()]);
        let e = Explainer::new(model, bg, None).unwrap();
        assert_eq!(e.grid().len(), 51);
        let r = e.risk(&[0.0]).unwrap();
        assert!((r - 51.0).abs() < 1e-12);

        let one = FnModel::new("one", |_x: &[f64], t: &[f64]| vec![1.0; t.len()]);
        let e = Explainer::new(one, background(vec![1.0, 2.0]), None).unwrap();
        assert_eq!(e.chf(&[0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(e.risk(&[0.0]).unwrap(), 0.0);
        assert!(e.survival(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn output_type_parsing() {
        assert_eq!("chf".parse::<OutputType>().unwrap(), OutputType::Chf);
        assert!("hazard".parse::<OutputType>().is_err());
    }
}
