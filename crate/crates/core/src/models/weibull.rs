use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{constant_columns, SurvivalModel};
use crate::data::{Matrix, SurvivalDataset};
use crate::error::{Error, Result};
use crate::optim::{newton_maximize, Derivatives, FitOptions};

/// Weibull accelerated failure time model.
///
/// `S(t | x) = exp(-(t / scale(x))^shape)` with `scale(x) = exp(intercept + coefficients . x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeibullAftModel {
    pub shape: f64,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub log_likelihood: f64,
}

impl WeibullAftModel {
    pub fn new(shape: f64, intercept: f64, coefficients: Vec<f64>) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::input(format!(
                "Weibull shape must be positive, got {shape}"
            )));
        }
        Ok(Self {
            shape,
            intercept,
            coefficients,
            converged: true,
            iterations: 0,
            log_likelihood: f64::NAN,
        })
    }

    pub fn scale(&self, x: &[f64]) -> f64 {
        let lp: f64 = self.coefficients.iter().zip(x).map(|(b, v)| b * v).sum();
        (self.intercept + lp).exp()
    }

    pub fn cumulative_hazard(&self, x: &[f64], times: &[f64]) -> Vec<f64> {
        let scale = self.scale(x);
        times.iter().map(|t| (t / scale).powf(self.shape)).collect()
    }
}

impl SurvivalModel for WeibullAftModel {
    fn survival(&self, x: &[f64], times: &[f64]) -> Vec<f64> {
        self.cumulative_hazard(x, times)
            .into_iter()
            .map(|h| (-h).exp())
            .collect()
    }

    fn n_features(&self) -> Option<usize> {
        Some(self.coefficients.len())
    }

    fn label(&self) -> String {
        "weibull_aft".to_string()
    }
}

/// Right-censored Weibull log-likelihood in `(log shape, intercept, coefficients)`.
///
/// With `z = shape * (ln t - intercept - coefficients . x)` an event contributes
/// `ln shape + z - ln t - e^z` and a censored time `-e^z`.
#[derive(Debug, Clone)]
pub struct WeibullLikelihood {
    log_times: Vec<f64>,
    events: Vec<bool>,
    features: Matrix,
}

impl WeibullLikelihood {
    pub fn new(data: &SurvivalDataset) -> Result<Self> {
        if let Some(i) = data.times().iter().position(|t| *t <= 0.0) {
            return Err(Error::input(format!(
                "Weibull AFT needs positive times (row {i} has time 0)"
            )));
        }
        Ok(Self {
            log_times: data.times().iter().map(|t| t.ln()).collect(),
            events: data.events().to_vec(),
            features: data.features().clone(),
        })
    }

    /// `(0, ln(total time / events), 0, ...)`: the exponential fit without covariates.
    pub fn starting_point(&self) -> Vec<f64> {
        let total: f64 = self.log_times.iter().map(|l| l.exp()).sum();
        let d = self.events.iter().filter(|e| **e).count().max(1) as f64;
        let mut start = vec![0.0; 2 + self.features.n_cols()];
        start[1] = (total / d).ln();
        start
    }

    pub fn value(&self, params: &[f64]) -> f64 {
        self.derivatives(params).value
    }

    pub fn gradient(&self, params: &[f64]) -> Vec<f64> {
        self.derivatives(params).gradient.as_slice().to_vec()
    }

    pub fn hessian(&self, params: &[f64]) -> Vec<Vec<f64>> {
        let h = self.derivatives(params).hessian;
        (0..h.nrows())
            .map(|i| h.row(i).iter().copied().collect())
            .collect()
    }

    pub(crate) fn derivatives(&self, params: &[f64]) -> Derivatives {
        let q = params.len();
        let log_shape = params[0];
        let shape = log_shape.exp();
        let mut value = 0.0;
        let mut gradient = DVector::zeros(q);
        let mut hessian = DMatrix::zeros(q, q);
        let mut u = DVector::zeros(q - 1);
        for i in 0..self.log_times.len() {
            u[0] = 1.0;
            for (k, v) in self.features.row(i).iter().enumerate() {
                u[k + 1] = *v;
            }
            let mu: f64 = params[1..].iter().zip(u.iter()).map(|(b, v)| b * v).sum();
            let z = shape * (self.log_times[i] - mu);
            let ez = z.exp();
            let d = if self.events[i] { 1.0 } else { 0.0 };
            value += d * (log_shape + z - self.log_times[i]) - ez;

            gradient[0] += d * (1.0 + z) - ez * z;
            let dmu = -shape * (d - ez);
            hessian[(0, 0)] += d * z - ez * z * (z + 1.0);
            let cross = -shape * (d - ez * (1.0 + z));
            let curv = -shape * shape * ez;
            for a in 0..q - 1 {
                gradient[a + 1] += dmu * u[a];
                hessian[(0, a + 1)] += cross * u[a];
                hessian[(a + 1, 0)] += cross * u[a];
                for b in 0..q - 1 {
                    hessian[(a + 1, b + 1)] += curv * u[a] * u[b];
                }
            }
        }
        Derivatives {
            value,
            gradient,
            hessian,
        }
    }
}

/// Fit a Weibull AFT model by Newton-Raphson with step-halving.
///
/// Constant feature columns are collinear with the intercept and stay at 0.
pub fn fit_weibull_aft(data: &SurvivalDataset, opts: FitOptions) -> Result<WeibullAftModel> {
    if data.n_rows() < 2 {
        return Err(Error::input(
            "Weibull AFT fit needs at least 2 observations",
        ));
    }
    let full = WeibullLikelihood::new(data)?;
    if data.n_events() == 0 {
        return Err(Error::Fit(
            "Weibull AFT fit needs at least one event".into(),
        ));
    }
    let p = data.n_features();
    let constant = constant_columns(data.features());
    let active: Vec<usize> = (0..p).filter(|j| !constant[*j]).collect();
    let mut reduced_features = Matrix::zeros(data.n_rows(), active.len());
    for i in 0..data.n_rows() {
        for (k, j) in active.iter().enumerate() {
            reduced_features.set(i, k, data.features().get(i, *j));
        }
    }
    let reduced = WeibullLikelihood {
        log_times: full.log_times.clone(),
        events: full.events.clone(),
        features: reduced_features,
    };
    let guarded: Vec<usize> = (2..2 + active.len()).collect();
    let outcome = newton_maximize(
        |params| reduced.derivatives(params),
        reduced.starting_point(),
        opts,
        &guarded,
    )?;
    let mut coefficients = vec![0.0; p];
    for (k, j) in active.iter().enumerate() {
        coefficients[*j] = outcome.params[2 + k];
    }
    Ok(WeibullAftModel {
        shape: outcome.params[0].exp(),
        intercept: outcome.params[1],
        coefficients,
        converged: outcome.converged,
        iterations: outcome.iterations,
        log_likelihood: outcome.loglik,
    })
}
