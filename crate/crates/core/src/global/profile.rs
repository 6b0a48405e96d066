use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Matrix, TimeGrid};
use crate::error::{Error, Result};
use crate::explainer::{Explainer, OutputType};
use crate::stats::{quantile_grid, running_mean_update, subsample_indices};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMethod {
    Pdp,
    Ale,
}

impl FromStr for ProfileMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pdp" => Ok(ProfileMethod::Pdp),
            "ale" => Ok(ProfileMethod::Ale),
            other => Err(Error::input(format!(
                "unknown profile method '{other}' (expected pdp or ale)"
            ))),
        }
    }
}

impl fmt::Display for ProfileMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileMethod::Pdp => "pdp",
            ProfileMethod::Ale => "ale",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    /// Grid points per variable; `None` picks 25 for PDP, 10 bins for ALE and 10 per
    /// axis for 2-D profiles.
    pub grid_size: Option<usize>,
    /// Cap on background rows averaged over.
    pub n_background: usize,
    pub output_type: OutputType,
    pub seed: u64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            grid_size: None,
            n_background: 100,
            output_type: OutputType::Survival,
            seed: 42,
        }
    }
}

/// Profile of one or two variables over time.
///
/// `values[g]` is the curve at grid point `g` (row-major over the variables for 2-D
/// profiles); each curve has one value per time point, or a single value for `risk`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSurface {
    pub variables: Vec<String>,
    pub grid_values: Vec<Vec<f64>>,
    /// `None` for risk output.
    pub times: Option<TimeGrid>,
    pub values: Vec<Vec<f64>>,
    pub method: ProfileMethod,
    pub output_type: OutputType,
}

impl ProfileSurface {
    /// Curve at the given per-variable grid indices.
    pub fn curve(&self, index: &[usize]) -> &[f64] {
        let mut flat = 0;
        for (axis, i) in index.iter().enumerate() {
            flat = flat * self.grid_values[axis].len() + i;
        }
        &self.values[flat]
    }
}

fn background_sample(explainer: &Explainer, opts: &ProfileOptions) -> Matrix {
    let bg = explainer.background().features();
    bg.select_rows(&subsample_indices(
        bg.n_rows(),
        opts.n_background,
        opts.seed,
    ))
}

fn output_times(explainer: &Explainer, output_type: OutputType) -> Option<TimeGrid> {
    (output_type != OutputType::Risk).then(|| explainer.grid().clone())
}

/// Partial dependence of variable `j` over `grid_values`, averaged over `rows`.
pub fn partial_dependence(
    explainer: &Explainer,
    rows: &Matrix,
    j: usize,
    grid_values: &[f64],
    output_type: OutputType,
) -> Result<Vec<Vec<f64>>> {
    grid_values
        .iter()
        .map(|&z| average_with(explainer, rows, &[(j, z)], output_type))
        .collect()
}

/// Mean output over `rows` with the listed coordinates overwritten.
fn average_with(
    explainer: &Explainer,
    rows: &Matrix,
    overrides: &[(usize, f64)],
    output_type: OutputType,
) -> Result<Vec<f64>> {
    let mut acc: Vec<f64> = Vec::new();
    let mut x = vec![0.0; rows.n_cols()];
    for (k, row) in rows.rows().enumerate() {
        x.copy_from_slice(row);
        for &(j, z) in overrides {
            x[j] = z;
        }
        let y = explainer.output(&x, output_type)?;
        if k == 0 {
            acc = vec![0.0; y.len()];
        }
        running_mean_update(&mut acc, &y, k);
    }
    Ok(acc)
}

/// PDP or ALE profile of one variable.
pub fn model_profile(
    explainer: &Explainer,
    variable: &str,
    method: ProfileMethod,
    opts: ProfileOptions,
) -> Result<ProfileSurface> {
    let j = explainer.background().feature_index(variable)?;
    let column = explainer.background().features().column(j);
    let sample = background_sample(explainer, &opts);
    let (grid_values, values) = match method {
        ProfileMethod::Pdp => {
            let grid = quantile_grid(&column, opts.grid_size.unwrap_or(25));
            let values = partial_dependence(explainer, &sample, j, &grid, opts.output_type)?;
            (grid, values)
        }
        ProfileMethod::Ale => {
            let edges = quantile_grid(&column, opts.grid_size.unwrap_or(10) + 1);
            if edges.len() < 2 {
                return Err(Error::input(format!(
                    "variable '{variable}' is constant; ALE needs bins of nonzero width"
                )));
            }
            let values =
                accumulated_local_effects(explainer, &sample, j, &edges, opts.output_type)?;
            (edges, values)
        }
    };
    Ok(ProfileSurface {
        variables: vec![variable.to_string()],
        grid_values: vec![grid_values],
        times: output_times(explainer, opts.output_type),
        values,
        method,
        output_type: opts.output_type,
    })
}

/// ALE values at the bin edges, centered to zero mean over the edges at every time.
fn accumulated_local_effects(
    explainer: &Explainer,
    rows: &Matrix,
    j: usize,
    edges: &[f64],
    output_type: OutputType,
) -> Result<Vec<Vec<f64>>> {
    let n_bins = edges.len() - 1;
    let width = explainer.output(rows.row(0), output_type)?.len();
    let mut effect = vec![vec![0.0; width]; n_bins];
    let mut count = vec![0usize; n_bins];
    let mut x = vec![0.0; rows.n_cols()];
    for row in rows.rows() {
        let v = row[j];
        // bin b covers (edges[b], edges[b + 1]]; the lowest edge joins the first bin
        let b = edges[1..].partition_point(|e| *e < v).min(n_bins - 1);
        x.copy_from_slice(row);
        x[j] = edges[b + 1];
        let upper = explainer.output(&x, output_type)?;
        x[j] = edges[b];
        let lower = explainer.output(&x, output_type)?;
        let diff: Vec<f64> = upper.iter().zip(&lower).map(|(u, l)| u - l).collect();
        running_mean_update(&mut effect[b], &diff, count[b]);
        count[b] += 1;
    }
    let mut accumulated = Vec::with_capacity(edges.len());
    let mut current = vec![0.0; width];
    accumulated.push(current.clone());
    for bin in &effect {
        for (c, e) in current.iter_mut().zip(bin) {
            *c += e;
        }
        accumulated.push(current.clone());
    }
    let n = accumulated.len() as f64;
    for t in 0..width {
        let mean = accumulated.iter().map(|a| a[t]).sum::<f64>() / n;
        for a in accumulated.iter_mut() {
            a[t] -= mean;
        }
    }
    Ok(accumulated)
}

/// Two-variable partial dependence surface.
pub fn model_profile_2d(
    explainer: &Explainer,
    variables: (&str, &str),
    opts: ProfileOptions,
) -> Result<ProfileSurface> {
    if variables.0 == variables.1 {
        return Err(Error::input(format!(
            "2-D profile needs two distinct variables, got '{}' twice",
            variables.0
        )));
    }
    let bg = explainer.background();
    let ja = bg.feature_index(variables.0)?;
    let jb = bg.feature_index(variables.1)?;
    let size = opts.grid_size.unwrap_or(10);
    let grid_a = quantile_grid(&bg.features().column(ja), size);
    let grid_b = quantile_grid(&bg.features().column(jb), size);
    let sample = background_sample(explainer, &opts);
    let mut values = Vec::with_capacity(grid_a.len() * grid_b.len());
    for &za in &grid_a {
        for &zb in &grid_b {
            values.push(average_with(
                explainer,
                &sample,
                &[(ja, za), (jb, zb)],
                opts.output_type,
            )?);
        }
    }
    Ok(ProfileSurface {
        variables: vec![variables.0.to_string(), variables.1.to_string()],
        grid_values: vec![grid_a, grid_b],
        times: output_times(explainer, opts.output_type),
        values,
        method: ProfileMethod::Pdp,
        output_type: opts.output_type,
    })
}
