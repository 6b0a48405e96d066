//! SurvLIME: a local Cox surrogate fitted around one instance.
//!
//! Neighbours are drawn from a Gaussian centred on the instance with per-feature
//! background standard deviations and weighted by `exp(-d^2 / sigma^2)`, where `sigma`
//! is the mean pairwise distance between neighbours. For each neighbour the black-box
//! log cumulative hazard is compared with the Nelson-Aalen baseline of the background,
//! and the spacing-weighted average of that log-ratio over the grid is regressed (WLS,
//! with intercept) on the centred features. For a proportional hazards black box the
//! log-ratio is constant in time and linear in the features, so the fit is exact.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::curve::SURVIVAL_FLOOR;
use crate::error::{Error, Result};
use crate::estimators::nelson_aalen;
use crate::explainer::Explainer;
use crate::stats::{derive_rng, running_mean, sample_std};

const RIDGE_PENALTY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimeOptions {
    pub n_neighbors: usize,
    pub seed: u64,
}

impl Default for LimeOptions {
    fn default() -> Self {
        Self {
            n_neighbors: 100,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvLimeResult {
    pub instance: Vec<f64>,
    pub variables: Vec<String>,
    pub surrogate_beta: Vec<f64>,
    pub neighborhood_size: usize,
    pub kernel_width: f64,
    /// Weighted least-squares objective at the fitted coefficients.
    pub fit_residual: f64,
    /// Objective with all coefficients at zero (intercept only).
    pub null_residual: f64,
    /// Set when the normal equations were singular and a ridge penalty was added.
    pub degenerate: bool,
    pub seed: u64,
}

fn mean_pairwise_distance(points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            let d2: f64 = points[a]
                .iter()
                .zip(&points[b])
                .map(|(u, v)| (u - v) * (u - v))
                .sum();
            total += d2.sqrt();
        }
    }
    total / (n * (n - 1) / 2) as f64
}

pub fn predict_parts_survlime(
    explainer: &Explainer,
    x: &[f64],
    opts: LimeOptions,
) -> Result<SurvLimeResult> {
    let p = explainer.n_features();
    if p == 0 {
        return Err(Error::input("SurvLIME needs at least one feature"));
    }
    if x.len() != p {
        return Err(Error::input(format!(
            "instance has {} features, explainer expects {p}",
            x.len()
        )));
    }
    if opts.n_neighbors < 2 {
        return Err(Error::input("SurvLIME needs at least 2 neighbours"));
    }
    let bg = explainer.background();
    let columns: Vec<Vec<f64>> = (0..p).map(|j| bg.features().column(j)).collect();
    let std: Vec<f64> = columns.iter().map(|c| sample_std(c)).collect();
    let centers: Vec<f64> = columns.iter().map(running_mean).collect();
    let active: Vec<usize> = (0..p).filter(|j| std[*j] > 0.0).collect();

    let mut rng = derive_rng(opts.seed, 0);
    let neighbors: Vec<Vec<f64>> = (0..opts.n_neighbors)
        .map(|_| {
            x.iter()
                .zip(&std)
                .map(|(xj, sj)| {
                    if *sj > 0.0 {
                        let e: f64 = rng.sample(StandardNormal);
                        xj + sj * e
                    } else {
                        *xj
                    }
                })
                .collect()
        })
        .collect();

    let sigma = mean_pairwise_distance(&neighbors);
    let weights: Vec<f64> = neighbors
        .iter()
        .map(|z| {
            if sigma == 0.0 {
                return 1.0;
            }
            let d2: f64 = z.iter().zip(x).map(|(u, v)| (u - v) * (u - v)).sum();
            (-d2 / (sigma * sigma)).exp()
        })
        .collect();
    let weight_sum: f64 = weights.iter().sum();
    if weight_sum <= 0.0 || !weight_sum.is_finite() {
        return Err(Error::Numeric(
            "all SurvLIME kernel weights are zero".into(),
        ));
    }

    // time points where the baseline is positive, with left spacing weights
    let grid = explainer.grid().points();
    let baseline = nelson_aalen(bg)?;
    let mut used: Vec<(usize, f64, f64)> = Vec::new();
    for (k, &t) in grid.iter().enumerate() {
        let h0 = baseline.eval(t);
        if h0 > 0.0 {
            let spacing = if k == 0 { t } else { t - grid[k - 1] };
            used.push((k, spacing, h0.ln()));
        }
    }
    let total_spacing: f64 = used.iter().map(|u| u.1).sum();
    if used.is_empty() || total_spacing <= 0.0 {
        return Err(Error::Numeric(
            "baseline cumulative hazard is zero on the whole grid".into(),
        ));
    }
    let targets = neighbors
        .iter()
        .map(|z| {
            let h = explainer.chf(z)?;
            let s: f64 = used
                .iter()
                .map(|&(k, dk, ln_h0)| dk * (h[k].max(SURVIVAL_FLOOR).ln() - ln_h0))
                .sum();
            Ok(s / total_spacing)
        })
        .collect::<Result<Vec<f64>>>()?;

    // weighted least squares on [1, z - background mean] over active features
    let q = active.len() + 1;
    let design = DMatrix::from_fn(opts.n_neighbors, q, |i, c| {
        if c == 0 {
            1.0
        } else {
            let j = active[c - 1];
            neighbors[i][j] - centers[j]
        }
    });
    let w = DVector::from_vec(weights.clone());
    let y = DVector::from_vec(targets.clone());
    let mut xtwx = DMatrix::zeros(q, q);
    let mut xtwy = DVector::zeros(q);
    for i in 0..opts.n_neighbors {
        let row = design.row(i).transpose();
        xtwx.ger(w[i], &row, &row, 1.0);
        xtwy.axpy(w[i] * y[i], &row, 1.0);
    }
    let mut degenerate = false;
    let coef = match xtwx.clone().cholesky() {
        Some(ch) => ch.solve(&xtwy),
        None => {
            degenerate = true;
            let ridged = &xtwx + DMatrix::identity(q, q) * RIDGE_PENALTY;
            ridged
                .cholesky()
                .ok_or_else(|| Error::Numeric("SurvLIME normal equations are singular".into()))?
                .solve(&xtwy)
        }
    };
    let fitted = &design * &coef;
    let fit_residual: f64 = (0..opts.n_neighbors)
        .map(|i| w[i] * (y[i] - fitted[i]).powi(2))
        .sum();
    let weighted_mean = (0..opts.n_neighbors).map(|i| w[i] * y[i]).sum::<f64>() / weight_sum;
    let null_residual: f64 = (0..opts.n_neighbors)
        .map(|i| w[i] * (y[i] - weighted_mean).powi(2))
        .sum();

    let mut surrogate_beta = vec![0.0; p];
    for (c, j) in active.iter().enumerate() {
        surrogate_beta[*j] = coef[c + 1];
    }
    if surrogate_beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::Numeric(
            "SurvLIME coefficients are not finite".into(),
        ));
    }
    Ok(SurvLimeResult {
        instance: x.to_vec(),
        variables: bg.feature_names().to_vec(),
        surrogate_beta,
        neighborhood_size: opts.n_neighbors,
        kernel_width: sigma,
        fit_residual,
        null_residual,
        degenerate,
        seed: opts.seed,
    })
}
