//! SurvSHAP(t): Shapley attributions of the survival function at every grid time.
//!
//! The game at time `t` is `v(S)(t) = mean_b f(z_{S,b})(t)`, where `z_{S,b}` takes the
//! explained instance on the coordinates in `S` and background row `b` elsewhere. Up to
//! [`EXACT_MAX_FEATURES`] features every coalition is enumerated; beyond that the
//! Shapley values are estimated by averaging marginal contributions along sampled
//! feature orderings.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Matrix, TimeGrid};
use crate::error::{Error, Result};
use crate::explainer::Explainer;
use crate::stats::{derive_rng, normalized_trapezoid, running_mean_update, subsample_indices};

/// Largest feature count handled by full coalition enumeration under `ShapMethod::Auto`.
pub const EXACT_MAX_FEATURES: usize = 10;
const EXACT_HARD_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapMethod {
    Auto,
    Exact,
    Sampling,
}

impl FromStr for ShapMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(ShapMethod::Auto),
            "exact" => Ok(ShapMethod::Exact),
            "sampling" => Ok(ShapMethod::Sampling),
            other => Err(Error::input(format!(
                "unknown SHAP method '{other}' (expected auto, exact or sampling)"
            ))),
        }
    }
}

impl fmt::Display for ShapMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShapMethod::Auto => "auto",
            ShapMethod::Exact => "exact",
            ShapMethod::Sampling => "sampling",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapOptions {
    pub n_background: usize,
    pub method: ShapMethod,
    /// Sampled orderings for the sampling estimator.
    pub n_permutations: usize,
    pub seed: u64,
}

impl Default for ShapOptions {
    fn default() -> Self {
        Self {
            n_background: 100,
            method: ShapMethod::Auto,
            n_permutations: 100,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvShapResult {
    pub instance: Vec<f64>,
    pub variables: Vec<String>,
    pub times: TimeGrid,
    /// `phi[j][k]`: attribution of variable `j` at time `k`.
    pub phi: Vec<Vec<f64>>,
    /// Survival prediction for the instance.
    pub prediction: Vec<f64>,
    /// Mean background prediction, `v(empty)`.
    pub baseline: Vec<f64>,
    /// Normalized time integral of `|phi[j]|`.
    pub aggregate: Vec<f64>,
    /// `Exact` or `Sampling`; never `Auto`.
    pub method: ShapMethod,
    /// Coalitions evaluated (exact) or orderings sampled (sampling).
    pub n_samples: usize,
    pub seed: u64,
    /// Monte-Carlo standard error of each `phi[j][k]` (sampling only).
    pub standard_error: Option<Vec<Vec<f64>>>,
}

/// Coalition values for one instance against a fixed background sample.
struct Game<'a> {
    explainer: &'a Explainer,
    instance: &'a [f64],
    background: Matrix,
}

impl Game<'_> {
    fn value(&self, mask: u64) -> Result<Vec<f64>> {
        let mut acc = Vec::new();
        let mut z = vec![0.0; self.instance.len()];
        for (k, row) in self.background.rows().enumerate() {
            for (j, zj) in z.iter_mut().enumerate() {
                *zj = if mask >> j & 1 == 1 {
                    self.instance[j]
                } else {
                    row[j]
                };
            }
            let s = self.explainer.survival(&z)?;
            if k == 0 {
                acc = vec![0.0; s.len()];
            }
            running_mean_update(&mut acc, &s, k);
        }
        Ok(acc)
    }
}

/// Sum that depends only on the multiset of terms, not their order.
fn order_free_sum(terms: &mut [f64]) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

fn shapley_weights(p: usize) -> Vec<f64> {
    let fact = |n: usize| (1..=n).fold(1.0_f64, |a, k| a * k as f64);
    (0..p)
        .map(|s| fact(s) * fact(p - s - 1) / fact(p))
        .collect()
}

fn exact_phi(game: &Game, p: usize, t_len: usize) -> Result<Vec<Vec<f64>>> {
    let n_masks = 1u64 << p;
    let values = (0..n_masks)
        .map(|m| game.value(m))
        .collect::<Result<Vec<_>>>()?;
    let weights = shapley_weights(p);
    let mut phi = vec![vec![0.0; t_len]; p];
    let mut terms = Vec::with_capacity(1 << (p - 1));
    for (j, phi_j) in phi.iter_mut().enumerate() {
        let bit = 1u64 << j;
        for (t, out) in phi_j.iter_mut().enumerate() {
            terms.clear();
            for mask in (0..n_masks).filter(|m| m & bit == 0) {
                let w = weights[mask.count_ones() as usize];
                terms.push(w * (values[(mask | bit) as usize][t] - values[mask as usize][t]));
            }
            *out = order_free_sum(&mut terms);
        }
    }
    Ok(phi)
}

/// Values indexed `[feature][time]`.
type Surface = Vec<Vec<f64>>;

/// Marginal contributions averaged over sampled orderings; returns (phi, standard error).
fn sampled_phi(
    game: &Game,
    p: usize,
    t_len: usize,
    n_permutations: usize,
    seed: u64,
) -> Result<(Surface, Surface)> {
    let mut cache: HashMap<u64, Vec<f64>> = HashMap::new();
    let mut value = |mask: u64| -> Result<Vec<f64>> {
        if let Some(v) = cache.get(&mask) {
            return Ok(v.clone());
        }
        let v = game.value(mask)?;
        cache.insert(mask, v.clone());
        Ok(v)
    };
    let mut mean = vec![vec![0.0; t_len]; p];
    let mut m2 = vec![vec![0.0; t_len]; p];
    let mut order: Vec<usize> = (0..p).collect();
    let empty = value(0)?;
    for m in 0..n_permutations {
        order.sort_unstable();
        order.shuffle(&mut derive_rng(seed, m as u64));
        let mut mask = 0u64;
        let mut prev = empty.clone();
        for &j in &order {
            mask |= 1 << j;
            let cur = value(mask)?;
            let count = (m + 1) as f64;
            for t in 0..t_len {
                let c = cur[t] - prev[t];
                let delta = c - mean[j][t];
                mean[j][t] += delta / count;
                m2[j][t] += delta * (c - mean[j][t]);
            }
            prev = cur;
        }
    }
    let n = n_permutations as f64;
    let se = m2
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| {
                    if n > 1.0 {
                        (s / (n - 1.0) / n).sqrt()
                    } else {
                        f64::INFINITY
                    }
                })
                .collect()
        })
        .collect();
    Ok((mean, se))
}

/// SurvSHAP(t) attributions for one instance.
pub fn predict_parts_survshap(
    explainer: &Explainer,
    x: &[f64],
    opts: ShapOptions,
) -> Result<SurvShapResult> {
    let p = explainer.n_features();
    if p == 0 {
        return Err(Error::input("SurvSHAP needs at least one feature"));
    }
    if x.len() != p {
        return Err(Error::input(format!(
            "instance has {} features, explainer expects {p}",
            x.len()
        )));
    }
    if p > 63 {
        return Err(Error::input("SurvSHAP supports at most 63 features"));
    }
    let method = match opts.method {
        ShapMethod::Auto if p <= EXACT_MAX_FEATURES => ShapMethod::Exact,
        ShapMethod::Auto => ShapMethod::Sampling,
        ShapMethod::Exact if p > EXACT_HARD_LIMIT => {
            return Err(Error::input(format!(
                "exact SurvSHAP is limited to {EXACT_HARD_LIMIT} features, got {p}"
            )))
        }
        m => m,
    };
    if method == ShapMethod::Sampling && opts.n_permutations < 1 {
        return Err(Error::input("n_permutations must be at least 1"));
    }
    let bg = explainer.background().features();
    let game = Game {
        explainer,
        instance: x,
        background: bg.select_rows(&subsample_indices(
            bg.n_rows(),
            opts.n_background.max(1),
            opts.seed,
        )),
    };
    let prediction = explainer.survival(x)?;
    let baseline = game.value(0)?;
    let t_len = prediction.len();
    let (phi, standard_error, n_samples) = match method {
        ShapMethod::Exact => (exact_phi(&game, p, t_len)?, None, 1usize << p),
        _ => {
            let (phi, se) = sampled_phi(&game, p, t_len, opts.n_permutations, opts.seed)?;
            (phi, Some(se), opts.n_permutations)
        }
    };
    let grid = explainer.grid();
    let aggregate = phi
        .iter()
        .map(|row| {
            let abs: Vec<Option<f64>> = row.iter().map(|v| Some(v.abs())).collect();
            normalized_trapezoid(grid.points(), &abs).unwrap_or(0.0)
        })
        .collect();
    Ok(SurvShapResult {
        instance: x.to_vec(),
        variables: explainer.background().feature_names().to_vec(),
        times: grid.clone(),
        phi,
        prediction,
        baseline,
        aggregate,
        method,
        n_samples,
        seed: opts.seed,
        standard_error,
    })
}

/// One dot of a bee swarm / dependence plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeeswarmPoint {
    pub instance: usize,
    pub variable: String,
    pub feature_value: f64,
    /// Normalized time integral of the signed attribution.
    pub attribution: f64,
}

/// SurvSHAP(t) over a set of instances with global aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalSurvShap {
    pub variables: Vec<String>,
    pub times: TimeGrid,
    pub per_instance: Vec<SurvShapResult>,
    /// Mean over instances of `|phi[j][k]|`.
    pub mean_abs_phi: Vec<Vec<f64>>,
    /// Mean over instances of the per-instance aggregates, one entry per variable.
    pub importance: Vec<f64>,
    pub beeswarm: Vec<BeeswarmPoint>,
}

impl GlobalSurvShap {
    /// Variable indices ordered from most to least important.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.importance.len()).collect();
        idx.sort_by(|a, b| self.importance[*b].total_cmp(&self.importance[*a]));
        idx
    }
}

/// SurvSHAP(t) for every row of `x` (same options per row) plus global aggregates.
pub fn model_survshap(
    explainer: &Explainer,
    x: &Matrix,
    opts: ShapOptions,
) -> Result<GlobalSurvShap> {
    if x.n_rows() == 0 {
        return Err(Error::input("model_survshap needs at least one instance"));
    }
    let per_instance: Vec<SurvShapResult> = (0..x.n_rows())
        .into_par_iter()
        .map(|i| {
            predict_parts_survshap(explainer, x.row(i), opts)
                .map_err(|e| e.context(format!("row {i}")))
        })
        .collect::<Result<_>>()?;
    let p = explainer.n_features();
    let grid = explainer.grid();
    let t_len = grid.len();
    let m = per_instance.len() as f64;
    let mut mean_abs_phi = vec![vec![0.0; t_len]; p];
    let mut importance = vec![0.0; p];
    for r in &per_instance {
        for j in 0..p {
            for t in 0..t_len {
                mean_abs_phi[j][t] += r.phi[j][t].abs();
            }
            importance[j] += r.aggregate[j];
        }
    }
    mean_abs_phi.iter_mut().flatten().for_each(|v| *v /= m);
    importance.iter_mut().for_each(|v| *v /= m);
    let names = explainer.background().feature_names();
    let mut beeswarm = Vec::with_capacity(per_instance.len() * p);
    for (i, r) in per_instance.iter().enumerate() {
        for j in 0..p {
            let signed: Vec<Option<f64>> = r.phi[j].iter().map(|v| Some(*v)).collect();
            beeswarm.push(BeeswarmPoint {
                instance: i,
                variable: names[j].clone(),
                feature_value: r.instance[j],
                attribution: normalized_trapezoid(grid.points(), &signed).unwrap_or(0.0),
            });
        }
    }
    Ok(GlobalSurvShap {
        variables: names.to_vec(),
        times: grid.clone(),
        per_instance,
        mean_abs_phi,
        importance,
        beeswarm,
    })
}
