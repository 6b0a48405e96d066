//! Right-censored datasets, feature matrices and evaluation time grids.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix of numeric features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::input(format!(
                "matrix data has {} values, expected {}x{}",
                data.len(),
                n_rows,
                n_cols
            )));
        }
        Ok(Self {
            n_rows,
            n_cols,
            data,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    /// Build from a list of rows; all rows must share one length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::input(format!(
                    "row {i} has {} columns, expected {n_cols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            n_rows: rows.len(),
            n_cols,
            data,
        })
    }

    /// Build from columns of equal length.
    pub fn from_columns<C: AsRef<[f64]>>(n_rows: usize, columns: &[C]) -> Result<Self> {
        let n_cols = columns.len();
        let mut m = Self::zeros(n_rows, n_cols);
        for (j, col) in columns.iter().enumerate() {
            let col = col.as_ref();
            if col.len() != n_rows {
                return Err(Error::input(format!(
                    "column {j} has {} values, expected {n_rows}",
                    col.len()
                )));
            }
            for (i, v) in col.iter().enumerate() {
                m.data[i * n_cols + j] = *v;
            }
        }
        Ok(m)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_rows).map(move |i| self.row(i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n_cols + j] = value;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            self.set(i, j, *v);
        }
    }

    /// New matrix holding the selected rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            n_rows: indices.len(),
            n_cols: self.n_cols,
            data,
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Right-censored observations: times, event flags and a numeric feature matrix.
///
/// `events[i] == true` marks an observed event, `false` a right-censored time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalDataset {
    times: Vec<f64>,
    events: Vec<bool>,
    features: Matrix,
    feature_names: Vec<String>,
}

impl SurvivalDataset {
    pub fn new(
        times: Vec<f64>,
        events: Vec<bool>,
        features: Matrix,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let n = times.len();
        if n == 0 {
            return Err(Error::input("dataset is empty"));
        }
        if events.len() != n || features.n_rows() != n {
            return Err(Error::input(format!(
                "length mismatch: {} times, {} events, {} feature rows",
                n,
                events.len(),
                features.n_rows()
            )));
        }
        if let Some(i) = times.iter().position(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::input(format!(
                "time at row {i} must be finite and >= 0, got {}",
                times[i]
            )));
        }
        if feature_names.len() != features.n_cols() {
            return Err(Error::input(format!(
                "{} feature names for {} feature columns",
                feature_names.len(),
                features.n_cols()
            )));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if name.is_empty() {
                return Err(Error::input("feature names must be nonempty"));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::input(format!("duplicate feature name '{name}'")));
            }
        }
        if let Some(k) = features.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "non-finite feature value at row {}, column '{}'",
                k / features.n_cols(),
                feature_names[k % features.n_cols()]
            )));
        }
        Ok(Self {
            times,
            events,
            features,
            feature_names,
        })
    }

    /// Dataset with `p` anonymous features named `x1..xp`.
    pub fn from_rows<R: AsRef<[f64]>>(
        times: Vec<f64>,
        events: Vec<bool>,
        rows: &[R],
    ) -> Result<Self> {
        let features = if rows.is_empty() {
            Matrix::zeros(0, 0)
        } else {
            Matrix::from_rows(rows)?
        };
        let names = (1..=features.n_cols()).map(|j| format!("x{j}")).collect();
        Self::new(times, events, features, names)
    }

    /// Dataset without features (p = 0).
    pub fn without_features(times: Vec<f64>, events: Vec<bool>) -> Result<Self> {
        let n = times.len();
        Self::new(times, events, Matrix::zeros(n, 0), Vec::new())
    }

    pub fn n_rows(&self) -> usize {
        self.times.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_cols()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn events(&self) -> &[bool] {
        &self.events
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_events(&self) -> usize {
        self.events.iter().filter(|e| **e).count()
    }

    pub fn feature_index(&self, name: &str) -> Result<usize> {
        self.feature_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| {
                Error::input(format!(
                    "unknown variable '{name}' (available: {})",
                    self.feature_names.join(", ")
                ))
            })
    }

    /// Same observations with a replacement feature matrix of identical shape.
    pub fn with_features(&self, features: Matrix) -> Result<Self> {
        if features.n_rows() != self.n_rows() || features.n_cols() != self.n_features() {
            return Err(Error::input(
                "replacement feature matrix has a different shape",
            ));
        }
        Ok(Self {
            times: self.times.clone(),
            events: self.events.clone(),
            features,
            feature_names: self.feature_names.clone(),
        })
    }

    /// Same data with every event flag inverted.
    pub fn flipped_events(&self) -> Self {
        Self {
            times: self.times.clone(),
            events: self.events.iter().map(|e| !e).collect(),
            features: self.features.clone(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Sorted distinct times at which at least one event was observed.
    pub fn unique_event_times(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self
            .times
            .iter()
            .zip(&self.events)
            .filter(|(_, e)| **e)
            .map(|(t, _)| *t)
            .collect();
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }
}

/// Strictly increasing, positive evaluation times (at least two).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::input(format!(
                "time grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(t) = points.iter().find(|t| !t.is_finite() || **t <= 0.0) {
            return Err(Error::input(format!(
                "time grid points must be finite and > 0, got {t}"
            )));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::input(format!(
                "time grid must be strictly increasing ({} followed by {})",
                w[0], w[1]
            )));
        }
        Ok(Self(points))
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn span(&self) -> f64 {
        self.last() - self.first()
    }
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = Error;

    fn try_from(points: Vec<f64>) -> Result<Self> {
        TimeGrid::new(points)
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(grid: TimeGrid) -> Self {
        grid.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(p: usize) -> Vec<String> {
        (0..p).map(|j| format!("v{j}")).collect()
    }

    #[test]
    fn dataset_rejects_inconsistent_input() {
        let m = Matrix::zeros(2, 1);
        assert!(SurvivalDataset::new(vec![], vec![], Matrix::zeros(0, 1), names(1)).is_err());
        assert!(SurvivalDataset::new(vec![1.0], vec![true, false], m.clone(), names(1)).is_err());
        assert!(
            SurvivalDataset::new(vec![1.0, -1.0], vec![true, false], m.clone(), names(1)).is_err()
        );
        assert!(
            SurvivalDataset::new(vec![1.0, f64::NAN], vec![true, false], m.clone(), names(1))
                .is_err()
        );
        assert!(SurvivalDataset::new(
            vec![1.0, 2.0],
            vec![true, false],
            m.clone(),
            vec!["".into()]
        )
        .is_err());
        let m2 = Matrix::zeros(2, 2);
        let dup = vec!["a".to_string(), "a".to_string()];
        assert!(SurvivalDataset::new(vec![1.0, 2.0], vec![true, false], m2, dup).is_err());
        let mut bad = m;
        bad.set(1, 0, f64::INFINITY);
        let err =
            SurvivalDataset::new(vec![1.0, 2.0], vec![true, false], bad, names(1)).unwrap_err();
        assert!(err.to_string().contains("row 1"));
    }

    #[test]
    fn zero_time_is_allowed_in_dataset() {
        let d = SurvivalDataset::without_features(vec![0.0, 2.0], vec![true, false]).unwrap();
        assert_eq!(d.n_features(), 0);
        assert_eq!(d.unique_event_times(), vec![0.0]);
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![1.0]).is_err());
        assert!(TimeGrid::new(vec![0.0, 1.0]).is_err());
        assert!(TimeGrid::new(vec![1.0, 1.0]).is_err());
        assert!(TimeGrid::new(vec![2.0, 1.0]).is_err());
        let g = TimeGrid::new(vec![1.0, 2.5]).unwrap();
        assert_eq!(g.span(), 1.5);
    }

    #[test]
    fn matrix_rows_and_columns() {
        let m = Matrix::from_columns(2, &[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m.row(1), &[2.0, 4.0]);
        assert_eq!(m.column(1), vec![3.0, 4.0]);
        assert_eq!(m.select_rows(&[1, 0]).row(0), &[2.0, 4.0]);
        assert!(Matrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
