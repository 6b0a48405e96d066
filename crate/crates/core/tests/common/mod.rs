#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use survival_explain::stats::derive_rng;
use survival_explain::{Matrix, SurvivalDataset};

/// Synthetic proportional hazards data: exponential baseline with rate `base_rate`,
/// standard normal features, independent exponential censoring with rate `censor_rate`
/// (0 disables censoring).
pub fn cox_data(
    n: usize,
    beta: &[f64],
    base_rate: f64,
    censor_rate: f64,
    seed: u64,
) -> SurvivalDataset {
    let mut rng = derive_rng(seed, 7);
    let p = beta.len();
    let mut times = Vec::with_capacity(n);
    let mut events = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
        let lp: f64 = x.iter().zip(beta).map(|(a, b)| a * b).sum();
        let u: f64 = rng.random_range(f64::EPSILON..1.0);
        let t = -u.ln() / (base_rate * lp.exp());
        let c = if censor_rate > 0.0 {
            let v: f64 = rng.random_range(f64::EPSILON..1.0);
            -v.ln() / censor_rate
        } else {
            f64::INFINITY
        };
        times.push(t.min(c));
        events.push(t <= c);
        rows.push(x);
    }
    SurvivalDataset::from_rows(times, events, &rows).unwrap()
}

pub fn dataset(times: &[f64], events: &[u8], rows: &[Vec<f64>]) -> SurvivalDataset {
    let events = events.iter().map(|e| *e == 1).collect();
    if rows.is_empty() {
        SurvivalDataset::without_features(times.to_vec(), events).unwrap()
    } else {
        SurvivalDataset::from_rows(times.to_vec(), events, rows).unwrap()
    }
}

pub fn matrix(rows: &[Vec<f64>]) -> Matrix {
    Matrix::from_rows(rows).unwrap()
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (tol {tol})");
}
