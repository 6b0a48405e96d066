//! Nonparametric estimators: Kaplan-Meier, Nelson-Aalen and the censoring distribution.

use crate::curve::{CurveKind, StepCurve};
use crate::data::SurvivalDataset;
use crate::error::Result;

/// Per distinct event time: (time, events at time, number at risk).
pub(crate) fn event_table(times: &[f64], events: &[bool]) -> Vec<(f64, usize, usize)> {
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|a, b| times[*a].total_cmp(&times[*b]));
    let n = times.len();
    let mut table = Vec::new();
    let mut k = 0;
    while k < n {
        let t = times[order[k]];
        let at_risk = n - k;
        let mut deaths = 0;
        let mut m = k;
        while m < n && times[order[m]] == t {
            if events[order[m]] {
                deaths += 1;
            }
            m += 1;
        }
        if deaths > 0 {
            table.push((t, deaths, at_risk));
        }
        k = m;
    }
    table
}

/// Product-limit estimate of the survival function, with knots at the distinct event times.
pub fn kaplan_meier(data: &SurvivalDataset) -> Result<StepCurve> {
    let table = event_table(data.times(), data.events());
    let mut s = 1.0;
    let mut times = Vec::with_capacity(table.len());
    let mut values = Vec::with_capacity(table.len());
    for (t, d, r) in table {
        s *= 1.0 - d as f64 / r as f64;
        times.push(t);
        values.push(s);
    }
    StepCurve::new(times, values, CurveKind::Survival)
}

/// Cumulative sum of `d/r` at the distinct event times.
pub fn nelson_aalen(data: &SurvivalDataset) -> Result<StepCurve> {
    let table = event_table(data.times(), data.events());
    let mut h = 0.0;
    let mut times = Vec::with_capacity(table.len());
    let mut values = Vec::with_capacity(table.len());
    for (t, d, r) in table {
        h += d as f64 / r as f64;
        times.push(t);
        values.push(h);
    }
    StepCurve::new(times, values, CurveKind::Chf)
}

/// Kaplan-Meier estimate of the censoring survival function `G(t)`,
/// i.e. the product-limit estimator with censorings counted as events.
pub fn censoring_km(data: &SurvivalDataset) -> Result<StepCurve> {
    kaplan_meier(&data.flipped_events())
}
