//! Right-continuous step functions over time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floor applied to survival probabilities before taking logarithms.
pub const SURVIVAL_FLOOR: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Survival,
    Chf,
    Generic,
}

/// Piecewise-constant curve with jumps at `times`.
///
/// Survival curves start at 1 and chf curves at 0 before the first knot; a generic
/// curve takes its first value there. Beyond the last knot the last value holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCurve {
    times: Vec<f64>,
    values: Vec<f64>,
    kind: CurveKind,
}

impl StepCurve {
    pub fn new(times: Vec<f64>, values: Vec<f64>, kind: CurveKind) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::input(format!(
                "curve has {} knots but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("curve knots must be strictly increasing"));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::input("curve knots must be finite"));
        }
        validate_values(&values, kind)?;
        Ok(Self {
            times,
            values,
            kind,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    fn initial(&self) -> f64 {
        match self.kind {
            CurveKind::Survival => 1.0,
            CurveKind::Chf => 0.0,
            CurveKind::Generic => self.values.first().copied().unwrap_or(0.0),
        }
    }

    /// Value at `t` (right-continuous).
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|s| *s <= t);
        if k == 0 {
            self.initial()
        } else {
            self.values[k - 1]
        }
    }

    /// Left limit at `t`: the value just before `t`.
    pub fn eval_left(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|s| *s < t);
        if k == 0 {
            self.initial()
        } else {
            self.values[k - 1]
        }
    }

    pub fn eval_many(&self, ts: &[f64]) -> Vec<f64> {
        ts.iter().map(|t| self.eval(*t)).collect()
    }
}

/// Check survival / chf value invariants; the message names the violated one.
pub(crate) fn validate_values(values: &[f64], kind: CurveKind) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::input(format!("non-finite curve value {v}")));
    }
    match kind {
        CurveKind::Survival => {
            if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::input(format!("survival value out of [0,1]: {v}")));
            }
            if let Some(k) = values.windows(2).position(|w| w[1] > w[0]) {
                return Err(Error::input(format!(
                    "survival curve is not nonincreasing (rises at position {})",
                    k + 1
                )));
            }
        }
        CurveKind::Chf => {
            if let Some(v) = values.iter().find(|v| **v < 0.0) {
                return Err(Error::input(format!(
                    "cumulative hazard value is negative: {v}"
                )));
            }
            if let Some(k) = values.windows(2).position(|w| w[1] < w[0]) {
                return Err(Error::input(format!(
                    "cumulative hazard is not nondecreasing (drops at position {})",
                    k + 1
                )));
            }
        }
        CurveKind::Generic => {}
    }
    Ok(())
}

/// Cumulative hazard from survival: `-ln(clamp(s, 1e-18, 1))`.
pub fn chf_from_survival(s: f64) -> f64 {
    let log_s = s.clamp(SURVIVAL_FLOOR, 1.0).ln();
    if log_s == 0.0 {
        0.0
    } else {
        -log_s
    }
}
