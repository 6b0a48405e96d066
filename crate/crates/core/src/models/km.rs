use serde::{Deserialize, Serialize};

use super::SurvivalModel;
use crate::curve::StepCurve;
use crate::data::SurvivalDataset;
use crate::error::Result;
use crate::estimators::kaplan_meier;

/// Covariate-free baseline: every row gets the Kaplan-Meier curve of the training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KaplanMeierModel {
    pub curve: StepCurve,
}

impl KaplanMeierModel {
    pub fn fit(data: &SurvivalDataset) -> Result<Self> {
        Ok(Self {
            curve: kaplan_meier(data)?,
        })
    }
}

impl SurvivalModel for KaplanMeierModel {
    fn survival(&self, _x: &[f64], times: &[f64]) -> Vec<f64> {
        self.curve.eval_many(times)
    }

    fn label(&self) -> String {
        "km".to_string()
    }
}
