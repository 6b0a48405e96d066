use serde::{Deserialize, Serialize};

use crate::data::TimeGrid;
use crate::error::{Error, Result};
use crate::explainer::{Explainer, OutputType};
use crate::stats::quantile_grid;

/// Individual conditional expectation (ceteris paribus) profile of one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IceProfile {
    pub variable: String,
    pub grid_values: Vec<f64>,
    /// `None` for risk output.
    pub times: Option<TimeGrid>,
    /// One curve per grid value.
    pub curves: Vec<Vec<f64>>,
    pub observed_value: f64,
    pub output_type: OutputType,
}

/// Predictions for `x` with coordinate `j` set to each of `grid_values`.
pub fn ice_curves(
    explainer: &Explainer,
    x: &[f64],
    j: usize,
    grid_values: &[f64],
    output_type: OutputType,
) -> Result<Vec<Vec<f64>>> {
    if j >= x.len() {
        return Err(Error::input(format!("variable index {j} out of range")));
    }
    let mut z = x.to_vec();
    grid_values
        .iter()
        .map(|&v| {
            z[j] = v;
            explainer.output(&z, output_type)
        })
        .collect()
}

/// ICE profile over background quantiles of `variable`, with the instance's own value
/// inserted into the grid.
pub fn predict_profile(
    explainer: &Explainer,
    x: &[f64],
    variable: &str,
    grid_size: usize,
    output_type: OutputType,
) -> Result<IceProfile> {
    let j = explainer.background().feature_index(variable)?;
    if x.len() != explainer.n_features() {
        return Err(Error::input(format!(
            "instance has {} features, explainer expects {}",
            x.len(),
            explainer.n_features()
        )));
    }
    let mut grid = quantile_grid(&explainer.background().features().column(j), grid_size);
    grid.push(x[j]);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let curves = ice_curves(explainer, x, j, &grid, output_type)?;
    Ok(IceProfile {
        variable: variable.to_string(),
        grid_values: grid,
        times: (output_type != OutputType::Risk).then(|| explainer.grid().clone()),
        curves,
        observed_value: x[j],
        output_type,
    })
}
