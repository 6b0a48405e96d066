use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::SurvivalDataset;
use crate::error::{Error, Result};
use crate::explainer::Explainer;
use crate::metrics::{Loss, LossValue};
use crate::stats::derive_rng;

/// Permutation importance of one variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableImportance {
    pub variable: String,
    pub baseline_loss: LossValue,
    /// Mean loss over the permuted repetitions.
    pub permuted_loss: LossValue,
    /// Mean over repetitions of `permuted - baseline`.
    pub importance: LossValue,
    /// `permuted - baseline` for each repetition.
    pub repetitions: Vec<LossValue>,
    pub n_permutations: usize,
    pub seed: u64,
}

/// Permutation importance on the explainer's background data.
pub fn model_parts(
    explainer: &Explainer,
    loss: Loss,
    n_permutations: usize,
    seed: u64,
) -> Result<Vec<VariableImportance>> {
    model_parts_on(
        explainer,
        explainer.background(),
        loss,
        n_permutations,
        seed,
    )
}

/// Permutation importance on an arbitrary dataset with the explainer's features.
///
/// Repetition `r` of variable `j` shuffles with its own generator, stream `(j << 32) | r`
/// of `seed`, so results do not depend on scheduling.
pub fn model_parts_on(
    explainer: &Explainer,
    data: &SurvivalDataset,
    loss: Loss,
    n_permutations: usize,
    seed: u64,
) -> Result<Vec<VariableImportance>> {
    if n_permutations < 1 {
        return Err(Error::input("n_permutations must be at least 1"));
    }
    let p = data.n_features();
    if p == 0 {
        return Err(Error::input(
            "permutation importance needs at least one feature",
        ));
    }
    if p != explainer.n_features() {
        return Err(Error::input(format!(
            "dataset has {p} features, explainer expects {}",
            explainer.n_features()
        )));
    }
    let baseline = loss.evaluate(explainer, data)?;
    let items: Vec<(usize, usize)> = (0..p)
        .flat_map(|j| (0..n_permutations).map(move |r| (j, r)))
        .collect();
    let losses: Vec<LossValue> = items
        .par_iter()
        .map(|&(j, r)| {
            let mut column = data.features().column(j);
            column.shuffle(&mut derive_rng(seed, ((j as u64) << 32) | r as u64));
            let mut features = data.features().clone();
            features.set_column(j, &column);
            loss.evaluate(explainer, &data.with_features(features)?)
        })
        .collect::<Result<_>>()?;

    data.feature_names()
        .iter()
        .zip(losses.chunks(n_permutations))
        .map(|(name, chunk)| {
            let repetitions = chunk
                .iter()
                .map(|l| l.minus(&baseline))
                .collect::<Result<Vec<_>>>()?;
            Ok(VariableImportance {
                variable: name.clone(),
                baseline_loss: baseline.clone(),
                permuted_loss: LossValue::mean(chunk)?,
                importance: LossValue::mean(&repetitions)?,
                repetitions,
                n_permutations,
                seed,
            })
        })
        .collect()
}
