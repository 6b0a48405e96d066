use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{constant_columns, SurvivalModel};
use crate::curve::{CurveKind, StepCurve};
use crate::data::{Matrix, SurvivalDataset};
use crate::error::{Error, Result};
use crate::optim::{newton_maximize, Derivatives, FitOptions};
use crate::stats::running_mean;

/// Cox proportional hazards model with a Breslow baseline cumulative hazard.
///
/// `CHF(t | x) = baseline_chf(t) * exp(beta . (x - feature_means))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxModel {
    pub beta: Vec<f64>,
    pub baseline_chf: StepCurve,
    pub feature_means: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub log_likelihood: f64,
}

impl CoxModel {
    /// Model with given coefficients; the baseline must be a chf curve.
    pub fn new(beta: Vec<f64>, baseline_chf: StepCurve, feature_means: Vec<f64>) -> Result<Self> {
        if beta.len() != feature_means.len() {
            return Err(Error::input("beta and feature_means differ in length"));
        }
        if baseline_chf.kind() != CurveKind::Chf {
            return Err(Error::input(
                "Cox baseline must be a cumulative hazard curve",
            ));
        }
        Ok(Self {
            beta,
            baseline_chf,
            feature_means,
            converged: true,
            iterations: 0,
            log_likelihood: f64::NAN,
        })
    }

    pub fn linear_predictor(&self, x: &[f64]) -> f64 {
        self.beta
            .iter()
            .zip(x.iter().zip(&self.feature_means))
            .map(|(b, (v, m))| b * (v - m))
            .sum()
    }

    pub fn cumulative_hazard(&self, x: &[f64], times: &[f64]) -> Vec<f64> {
        let scale = self.linear_predictor(x).exp();
        times
            .iter()
            .map(|t| self.baseline_chf.eval(*t) * scale)
            .collect()
    }
}

impl SurvivalModel for CoxModel {
    fn survival(&self, x: &[f64], times: &[f64]) -> Vec<f64> {
        self.cumulative_hazard(x, times)
            .into_iter()
            .map(|h| (-h).exp())
            .collect()
    }

    fn n_features(&self) -> Option<usize> {
        Some(self.beta.len())
    }

    fn label(&self) -> String {
        "cox".to_string()
    }
}

/// Breslow partial log-likelihood on internally centered features.
#[derive(Debug, Clone)]
pub struct CoxPartialLikelihood {
    centered: Matrix,
    times: Vec<f64>,
    events: Vec<bool>,
    /// Row indices grouped by tied time, latest time first.
    groups: Vec<Vec<usize>>,
    means: Vec<f64>,
}

impl CoxPartialLikelihood {
    pub fn new(data: &SurvivalDataset) -> Self {
        let features = data.features();
        let means: Vec<f64> = (0..features.n_cols())
            .map(|j| running_mean(&features.column(j)))
            .collect();
        let mut centered = features.clone();
        for i in 0..centered.n_rows() {
            for (v, m) in centered.row_mut(i).iter_mut().zip(&means) {
                *v -= m;
            }
        }
        let times = data.times();
        let mut order: Vec<usize> = (0..times.len()).collect();
        order.sort_by(|a, b| times[*b].total_cmp(&times[*a]));
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for i in order {
            match groups.last_mut() {
                Some(g) if times[g[0]] == times[i] => g.push(i),
                _ => groups.push(vec![i]),
            }
        }
        Self {
            centered,
            times: times.to_vec(),
            events: data.events().to_vec(),
            groups,
            means,
        }
    }

    pub fn feature_means(&self) -> &[f64] {
        &self.means
    }

    fn linear_predictors(&self, beta: &[f64]) -> Vec<f64> {
        self.centered
            .rows()
            .map(|row| row.iter().zip(beta).map(|(x, b)| x * b).sum())
            .collect()
    }

    pub fn value(&self, beta: &[f64]) -> f64 {
        self.derivatives(beta).value
    }

    pub fn gradient(&self, beta: &[f64]) -> Vec<f64> {
        self.derivatives(beta).gradient.as_slice().to_vec()
    }

    pub fn hessian(&self, beta: &[f64]) -> Vec<Vec<f64>> {
        let h = self.derivatives(beta).hessian;
        (0..h.nrows())
            .map(|i| h.row(i).iter().copied().collect())
            .collect()
    }

    pub(crate) fn derivatives(&self, beta: &[f64]) -> Derivatives {
        let p = self.centered.n_cols();
        let eta = self.linear_predictors(beta);
        let shift = eta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut s0 = 0.0;
        let mut s1 = DVector::zeros(p);
        let mut s2 = DMatrix::zeros(p, p);
        let mut value = 0.0;
        let mut gradient = DVector::zeros(p);
        let mut hessian = DMatrix::zeros(p, p);
        for group in &self.groups {
            for &i in group {
                let w = (eta[i] - shift).exp();
                let x = DVector::from_row_slice(self.centered.row(i));
                s0 += w;
                s1.axpy(w, &x, 1.0);
                s2.ger(w, &x, &x, 1.0);
            }
            let mean = &s1 / s0;
            let cov = &s2 / s0 - &mean * mean.transpose();
            for &i in group.iter().filter(|i| self.events[**i]) {
                value += eta[i] - (s0.ln() + shift);
                let x = DVector::from_row_slice(self.centered.row(i));
                gradient += x - &mean;
                hessian -= &cov;
            }
        }
        Derivatives {
            value,
            gradient,
            hessian,
        }
    }

    /// Breslow estimator of the baseline cumulative hazard at `beta`.
    pub fn breslow_baseline(&self, beta: &[f64]) -> Result<StepCurve> {
        let eta = self.linear_predictors(beta);
        let mut s0 = 0.0;
        let mut increments = Vec::new();
        for group in &self.groups {
            for &i in group {
                s0 += eta[i].exp();
            }
            let deaths = group.iter().filter(|i| self.events[**i]).count();
            if deaths > 0 {
                increments.push((self.times[group[0]], deaths as f64 / s0));
            }
        }
        increments.reverse();
        let mut h = 0.0;
        let mut times = Vec::with_capacity(increments.len());
        let mut values = Vec::with_capacity(increments.len());
        for (t, dh) in increments {
            h += dh;
            times.push(t);
            values.push(h);
        }
        StepCurve::new(times, values, CurveKind::Chf)
    }
}

/// Fit a Cox model by Newton-Raphson on the Breslow partial likelihood.
///
/// Constant columns are left at `beta = 0`. If a coefficient leaves `[-20, 20]` the
/// fit stops early and the model is returned with `converged = false`.
pub fn fit_cox(data: &SurvivalDataset, opts: FitOptions) -> Result<CoxModel> {
    if data.n_rows() < 2 {
        return Err(Error::input("Cox fit needs at least 2 observations"));
    }
    if data.n_events() == 0 {
        return Err(Error::Fit("Cox fit needs at least one event".into()));
    }
    let p = data.n_features();
    let constant = constant_columns(data.features());
    let active: Vec<usize> = (0..p).filter(|j| !constant[*j]).collect();
    let full = CoxPartialLikelihood::new(data);
    let reduced = CoxPartialLikelihood {
        centered: reduce_columns(&full.centered, &active),
        times: full.times.clone(),
        events: full.events.clone(),
        groups: full.groups.clone(),
        means: active.iter().map(|j| full.means[*j]).collect(),
    };
    let guarded: Vec<usize> = (0..active.len()).collect();
    let outcome = newton_maximize(
        |b| reduced.derivatives(b),
        vec![0.0; active.len()],
        opts,
        &guarded,
    )?;
    let mut beta = vec![0.0; p];
    for (k, j) in active.iter().enumerate() {
        beta[*j] = outcome.params[k];
    }
    let baseline_chf = full.breslow_baseline(&beta)?;
    Ok(CoxModel {
        beta,
        baseline_chf,
        feature_means: full.means.clone(),
        converged: outcome.converged,
        iterations: outcome.iterations,
        log_likelihood: outcome.loglik,
    })
}

fn reduce_columns(m: &Matrix, cols: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(m.n_rows(), cols.len());
    for i in 0..m.n_rows() {
        for (k, j) in cols.iter().enumerate() {
            out.set(i, k, m.get(i, *j));
        }
    }
    out
}
