//! Small numeric helpers shared across modules.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Linear-interpolation sample quantile (type 7) of unsorted data.
pub fn quantile(values: &[f64], prob: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, prob)
}

pub(crate) fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * prob.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// `k` quantiles at evenly spaced probabilities 0..=1, deduplicated and increasing.
pub fn quantile_grid(values: &[f64], k: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut grid: Vec<f64> = if k <= 1 {
        vec![quantile_sorted(&sorted, 0.5)]
    } else {
        (0..k)
            .map(|i| quantile_sorted(&sorted, i as f64 / (k - 1) as f64))
            .collect()
    };
    grid.dedup();
    grid
}

/// Trapezoid integral of `values` over `times`, divided by the span.
///
/// Entries that are `None` are skipped and the span shrinks to the defined points.
/// A single defined point yields its own value.
pub fn normalized_trapezoid(times: &[f64], values: &[Option<f64>]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter_map(|(t, v)| v.map(|v| (*t, v)))
        .collect();
    match pts.len() {
        0 => None,
        1 => Some(pts[0].1),
        _ => {
            let span = pts[pts.len() - 1].0 - pts[0].0;
            if span <= 0.0 {
                return Some(pts[0].1);
            }
            let area: f64 = pts
                .windows(2)
                .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
                .sum();
            Some(area / span)
        }
    }
}

/// Arithmetic mean as a running update; a constant sequence maps to its value exactly.
pub fn running_mean<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    let mut m = 0.0;
    for (k, v) in values.into_iter().enumerate() {
        m += (v - m) / (k + 1) as f64;
    }
    m
}

/// Elementwise running mean of equal-length vectors into `acc` (k = count so far, 0-based).
pub(crate) fn running_mean_update(acc: &mut [f64], next: &[f64], k: usize) {
    let denom = (k + 1) as f64;
    for (a, v) in acc.iter_mut().zip(next) {
        *a += (v - *a) / denom;
    }
}

/// Sample standard deviation (n - 1 denominator); zero for fewer than two values.
pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Independent generator for work item `stream` under a master seed.
///
/// Every (seed, stream) pair maps to its own ChaCha stream, so work items can be
/// processed in any order or in parallel with identical results.
pub fn derive_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// First `min(n, cap)` indices of a seeded shuffle of `0..n`.
pub fn subsample_indices(n: usize, cap: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    if cap < n {
        idx.shuffle(&mut derive_rng(seed, u64::MAX));
        idx.truncate(cap);
    }
    idx
}
