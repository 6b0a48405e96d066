use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::auc::risk_scores;
use super::{brier_score, cd_auc, concordance_from_scores};
use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::explainer::Explainer;
use crate::stats::running_mean_update;

/// Losses usable for permutation importance, all oriented so that larger is worse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    BrierIntegrated,
    BrierCurve,
    CdAucIntegrated,
    OneMinusCindex,
}

impl LossKind {
    pub const NAMES: [&'static str; 4] = [
        "brier_integrated",
        "brier_curve",
        "cd_auc_integrated",
        "one_minus_cindex",
    ];

    pub fn name(self) -> &'static str {
        match self {
            LossKind::BrierIntegrated => Self::NAMES[0],
            LossKind::BrierCurve => Self::NAMES[1],
            LossKind::CdAucIntegrated => Self::NAMES[2],
            LossKind::OneMinusCindex => Self::NAMES[3],
        }
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brier_integrated" => Ok(LossKind::BrierIntegrated),
            "brier_curve" => Ok(LossKind::BrierCurve),
            "cd_auc_integrated" => Ok(LossKind::CdAucIntegrated),
            "one_minus_cindex" => Ok(LossKind::OneMinusCindex),
            other => Err(Error::input(format!(
                "unknown loss '{other}' (valid: {})",
                Self::NAMES.join(", ")
            ))),
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossValue {
    Scalar(f64),
    /// Values on the explainer grid; `None` where the metric is undefined.
    Curve(Vec<Option<f64>>),
}

impl LossValue {
    /// Elementwise `self - other`; undefined where either side is.
    pub fn minus(&self, other: &LossValue) -> Result<LossValue> {
        match (self, other) {
            (LossValue::Scalar(a), LossValue::Scalar(b)) => Ok(LossValue::Scalar(a - b)),
            (LossValue::Curve(a), LossValue::Curve(b)) if a.len() == b.len() => Ok(
                LossValue::Curve(a.iter().zip(b).map(|(x, y)| Some((*x)? - (*y)?)).collect()),
            ),
            _ => Err(Error::input("loss values have different shapes")),
        }
    }

    /// Elementwise `self / other`; undefined where either side is or the divisor is zero.
    pub fn ratio(&self, other: &LossValue) -> Result<LossValue> {
        let div = |a: f64, b: f64| (b != 0.0).then(|| a / b);
        match (self, other) {
            (LossValue::Scalar(a), LossValue::Scalar(b)) => div(*a, *b)
                .map(LossValue::Scalar)
                .ok_or_else(|| Error::Undefined("ratio with zero baseline loss".into())),
            (LossValue::Curve(a), LossValue::Curve(b)) if a.len() == b.len() => Ok(
                LossValue::Curve(a.iter().zip(b).map(|(x, y)| div((*x)?, (*y)?)).collect()),
            ),
            _ => Err(Error::input("loss values have different shapes")),
        }
    }

    /// Elementwise running mean of same-shaped values, exact for repeated values.
    pub fn mean(values: &[LossValue]) -> Result<LossValue> {
        let first = values
            .first()
            .ok_or_else(|| Error::input("mean of no loss values"))?;
        let shape_error = || Error::input("loss values have different shapes");
        match first {
            LossValue::Scalar(_) => {
                let mut acc = [0.0];
                for (k, v) in values.iter().enumerate() {
                    let LossValue::Scalar(x) = v else {
                        return Err(shape_error());
                    };
                    running_mean_update(&mut acc, &[*x], k);
                }
                Ok(LossValue::Scalar(acc[0]))
            }
            LossValue::Curve(c) => {
                let mut acc: Vec<Option<f64>> = vec![Some(0.0); c.len()];
                for (k, v) in values.iter().enumerate() {
                    let LossValue::Curve(c) = v else {
                        return Err(shape_error());
                    };
                    if c.len() != acc.len() {
                        return Err(shape_error());
                    }
                    for (a, x) in acc.iter_mut().zip(c) {
                        *a = a.zip(*x).map(|(a, x)| a + (x - a) / (k + 1) as f64);
                    }
                }
                Ok(LossValue::Curve(acc))
            }
        }
    }
}

/// A loss evaluated on an explainer and a (possibly modified) dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Loss {
    pub kind: LossKind,
}

impl Loss {
    pub fn evaluate(&self, explainer: &Explainer, data: &SurvivalDataset) -> Result<LossValue> {
        let grid = explainer.grid();
        match self.kind {
            LossKind::BrierIntegrated => brier_score(explainer, data, grid)?
                .integrated
                .map(LossValue::Scalar)
                .ok_or_else(|| Error::Undefined("integrated Brier score is undefined".into())),
            LossKind::BrierCurve => {
                Ok(LossValue::Curve(brier_score(explainer, data, grid)?.values))
            }
            LossKind::CdAucIntegrated => cd_auc(explainer, data, grid)?
                .integrated
                .map(|auc| LossValue::Scalar(1.0 - auc))
                .ok_or_else(|| {
                    Error::Undefined("integrated cumulative/dynamic AUC is undefined".into())
                }),
            LossKind::OneMinusCindex => {
                let risk = risk_scores(explainer, data)?;
                let c = concordance_from_scores(data.times(), data.events(), &risk)?;
                Ok(LossValue::Scalar(1.0 - c))
            }
        }
    }
}

/// Loss by name: `brier_integrated`, `brier_curve`, `cd_auc_integrated` or `one_minus_cindex`.
pub fn loss_adapter(name: &str) -> Result<Loss> {
    Ok(Loss {
        kind: name.parse()?,
    })
}
