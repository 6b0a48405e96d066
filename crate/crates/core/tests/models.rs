mod common;

use common::{assert_close, cox_data, dataset};
use proptest::prelude::*;
use rand::Rng;
use survival_explain::stats::derive_rng;
use survival_explain::{
    fit_cox, fit_weibull_aft, predict_survival, CoxModel, CoxPartialLikelihood, CurveKind, Error,
    FitOptions, StepCurve, SurvivalDataset, SurvivalModel, TimeGrid, WeibullAftModel,
    WeibullLikelihood,
};

/// Breslow partial log-likelihood written directly from its definition, O(n^2).
fn naive_partial_loglik(d: &SurvivalDataset, beta: &[f64]) -> f64 {
    let eta: Vec<f64> = d
        .features()
        .rows()
        .map(|x| x.iter().zip(beta).map(|(a, b)| a * b).sum())
        .collect();
    let mut l = 0.0;
    for i in (0..d.n_rows()).filter(|&i| d.events()[i]) {
        let denom: f64 = (0..d.n_rows())
            .filter(|&j| d.times()[j] >= d.times()[i])
            .map(|j| eta[j].exp())
            .sum();
        l += eta[i] - denom.ln();
    }
    l
}

fn central_gradient(f: &dyn Fn(&[f64]) -> f64, at: &[f64], h: f64) -> Vec<f64> {
    (0..at.len())
        .map(|k| {
            let mut up = at.to_vec();
            let mut dn = at.to_vec();
            up[k] += h;
            dn[k] -= h;
            (f(&up) - f(&dn)) / (2.0 * h)
        })
        .collect()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn cox_gradient_and_hessian_match_finite_differences() {
    let d = cox_data(40, &[0.7, -0.4, 0.2], 0.3, 0.1, 11);
    let lik = CoxPartialLikelihood::new(&d);
    let mut rng = derive_rng(99, 0);
    let h = 1e-5;
    for _ in 0..5 {
        let beta: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = |b: &[f64]| naive_partial_loglik(&d, b);
        assert!(rel_err(lik.value(&beta), f(&beta)) < 1e-12);
        let fd = central_gradient(&f, &beta, h);
        for (a, n) in lik.gradient(&beta).iter().zip(&fd) {
            assert!(rel_err(*a, *n) < 1e-5, "gradient {a} vs {n}");
        }
        let hess = lik.hessian(&beta);
        for k in 0..3 {
            // the analytic gradient is checked above; difference it once more
            let g = |b: &[f64]| lik.gradient(b)[k];
            let fd_row = central_gradient(&g, &beta, h);
            for (a, n) in hess[k].iter().zip(&fd_row) {
                assert!(rel_err(*a, *n) < 1e-5, "hessian {a} vs {n}");
            }
        }
    }
}

#[test]
fn cox_gradient_at_zero_matches_finite_differences() {
    let d = dataset(
        &[1.0, 2.0, 3.0, 4.0],
        &[1, 1, 1, 1],
        &[vec![1.0], vec![1.0], vec![0.0], vec![0.0]],
    );
    let lik = CoxPartialLikelihood::new(&d);
    let fd = central_gradient(&|b: &[f64]| naive_partial_loglik(&d, b), &[0.0], 1e-5);
    assert!(rel_err(lik.gradient(&[0.0])[0], fd[0]) < 1e-6);
}

/// Maximize a 1-D function on [-10, 10] by repeatedly refining a uniform grid.
fn grid_search_max(f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (-10.0, 10.0);
    for _ in 0..12 {
        let step = (hi - lo) / 200.0;
        let best = (0..=200)
            .map(|i| lo + i as f64 * step)
            .max_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap();
        lo = (best - step).max(-10.0);
        hi = (best + step).min(10.0);
    }
    0.5 * (lo + hi)
}

#[test]
fn cox_beta_matches_grid_search_oracle() {
    let d = dataset(
        &[1.0, 2.0, 3.0, 4.0],
        &[1, 1, 1, 1],
        &[vec![1.0], vec![0.0], vec![1.0], vec![0.0]],
    );
    let oracle = grid_search_max(|b| naive_partial_loglik(&d, &[b]));
    let fit = fit_cox(&d, FitOptions::default()).unwrap();
    assert!(fit.converged);
    assert_close(fit.beta[0], oracle, 1e-6, "beta vs grid search");
    // stationary point solves u^2 - u - 4 = 0 with u = exp(beta)
    assert_close(
        fit.beta[0],
        ((1.0 + 17f64.sqrt()) / 2.0).ln(),
        1e-9,
        "closed form",
    );
}

#[test]
fn separating_covariate_trips_divergence_guard() {
    // x = 1 rows fail first: the partial likelihood increases without bound in beta
    let d = dataset(
        &[1.0, 2.0, 3.0, 4.0],
        &[1, 1, 1, 1],
        &[vec![1.0], vec![1.0], vec![0.0], vec![0.0]],
    );
    let oracle = grid_search_max(|b| naive_partial_loglik(&d, &[b]));
    assert!(oracle > 9.99, "grid maximum sits on the boundary: {oracle}");
    let fit = fit_cox(&d, FitOptions::default()).unwrap();
    assert!(!fit.converged);
    assert!(fit.beta[0] > 20.0);
}

#[test]
fn cox_constant_covariate_gets_zero() {
    let d = dataset(
        &[1.0, 3.0, 2.0, 5.0],
        &[1, 0, 1, 1],
        &[vec![2.5], vec![2.5], vec![2.5], vec![2.5]],
    );
    let fit = fit_cox(&d, FitOptions::default()).unwrap();
    assert_eq!(fit.beta, vec![0.0]);
    assert!(fit.converged);
}

#[test]
fn cox_errors() {
    let no_events = dataset(&[1.0, 2.0], &[0, 0], &[vec![0.0], vec![1.0]]);
    assert!(matches!(
        fit_cox(&no_events, FitOptions::default()),
        Err(Error::Fit(_))
    ));
    let single = dataset(&[1.0], &[1], &[vec![0.0]]);
    assert!(fit_cox(&single, FitOptions::default()).is_err());
}

#[test]
fn cox_fit_is_translation_invariant() {
    let d = cox_data(80, &[0.8, -0.5], 0.2, 0.05, 3);
    let shifted_rows: Vec<Vec<f64>> = d
        .features()
        .rows()
        .map(|r| vec![r[0] + 7.5, r[1] - 3.25])
        .collect();
    let shifted =
        SurvivalDataset::from_rows(d.times().to_vec(), d.events().to_vec(), &shifted_rows).unwrap();
    let a = fit_cox(&d, FitOptions::default()).unwrap();
    let b = fit_cox(&shifted, FitOptions::default()).unwrap();
    for (x, y) in a.beta.iter().zip(&b.beta) {
        assert!((x - y).abs() < 1e-8);
    }
}

#[test]
fn cox_fit_recovers_generating_coefficients() {
    let d = cox_data(1500, &[0.8, -0.5], 0.2, 0.05, 5);
    let fit = fit_cox(&d, FitOptions::default()).unwrap();
    assert!(fit.converged);
    assert_close(fit.beta[0], 0.8, 0.1, "beta 0");
    assert_close(fit.beta[1], -0.5, 0.1, "beta 1");
}

#[test]
fn cox_with_zero_beta_predicts_baseline() {
    let base = StepCurve::new(vec![1.0, 2.0], vec![0.2, 0.5], CurveKind::Chf).unwrap();
    let m = CoxModel::new(vec![0.0, 0.0], base, vec![1.0, -1.0]).unwrap();
    let grid = TimeGrid::new(vec![0.5, 1.0, 1.5, 2.0, 3.0]).unwrap();
    for x in [[0.0, 0.0], [5.0, -3.0]] {
        let s = predict_survival(&m, &x, &grid).unwrap();
        let expected: Vec<f64> = [0.0, 0.2, 0.2, 0.5, 0.5]
            .iter()
            .map(|h: &f64| (-h).exp())
            .collect();
        assert_eq!(s.values(), expected.as_slice());
    }
    assert!(predict_survival(&m, &[0.0], &grid).is_err());
}

#[test]
fn weibull_closed_form_prediction() {
    // shape 1, scale exp(ln 2) = 2: S(2) = e^-1
    let m = WeibullAftModel::new(1.0, 2f64.ln(), vec![0.0]).unwrap();
    let grid = TimeGrid::new(vec![1.0, 2.0]).unwrap();
    let s = predict_survival(&m, &[3.0], &grid).unwrap();
    assert_close(s.values()[1], (-1.0f64).exp(), 1e-15, "S(2)");
    assert!(WeibullAftModel::new(0.0, 0.0, vec![]).is_err());
}

#[test]
fn weibull_gradient_and_hessian_match_finite_differences() {
    let d = cox_data(60, &[0.5, -0.3], 0.5, 0.2, 21);
    let lik = WeibullLikelihood::new(&d).unwrap();
    let start = lik.starting_point();
    let mut rng = derive_rng(5, 0);
    let mut points = vec![start.clone()];
    for _ in 0..4 {
        points.push(
            start
                .iter()
                .map(|v| v + rng.random_range(-0.3..0.3))
                .collect(),
        );
    }
    let h = 1e-5;
    for at in points {
        let fd = central_gradient(&|p: &[f64]| lik.value(p), &at, h);
        for (a, n) in lik.gradient(&at).iter().zip(&fd) {
            assert!(rel_err(*a, *n) < 1e-6, "gradient {a} vs {n}");
        }
        let hess = lik.hessian(&at);
        for k in 0..at.len() {
            let gk = |p: &[f64]| lik.gradient(p)[k];
            let fd_row = central_gradient(&gk, &at, h);
            for (a, n) in hess[k].iter().zip(&fd_row) {
                assert!(rel_err(*a, *n) < 1e-5, "hessian {a} vs {n}");
            }
        }
    }
}

#[test]
fn weibull_exponential_data_has_unit_shape() {
    let mut rng = derive_rng(2024, 0);
    let times: Vec<f64> = (0..2000)
        .map(|_| -rng.random_range(f64::EPSILON..1.0f64).ln())
        .collect();
    let d = SurvivalDataset::without_features(times, vec![true; 2000]).unwrap();
    let fit = fit_weibull_aft(&d, FitOptions::default()).unwrap();
    assert!(fit.converged);
    assert!((fit.shape - 1.0).abs() < 0.1, "shape {}", fit.shape);
    assert!(fit.intercept.abs() < 0.1, "intercept {}", fit.intercept);
}

#[test]
fn weibull_zero_column_and_errors() {
    let d = cox_data(200, &[0.6], 0.5, 0.1, 8);
    let rows: Vec<Vec<f64>> = d.features().rows().map(|r| vec![r[0], 0.0]).collect();
    let d2 = SurvivalDataset::from_rows(d.times().to_vec(), d.events().to_vec(), &rows).unwrap();
    let fit = fit_weibull_aft(&d2, FitOptions::default()).unwrap();
    assert_eq!(fit.coefficients[1], 0.0);
    // hazard increases with x, so the time scale shrinks
    assert!(fit.coefficients[0] < 0.0);

    let zero_time = dataset(&[0.0, 1.0], &[1, 1], &[vec![0.0], vec![1.0]]);
    assert!(matches!(
        fit_weibull_aft(&zero_time, FitOptions::default()),
        Err(Error::Input(_))
    ));
    let no_events = dataset(&[1.0, 2.0], &[0, 0], &[vec![0.0], vec![1.0]]);
    assert!(matches!(
        fit_weibull_aft(&no_events, FitOptions::default()),
        Err(Error::Fit(_))
    ));
}

proptest! {
    #[test]
    fn predictions_are_valid_curves(
        beta in prop::collection::vec(-2.0f64..2.0, 2),
        x in prop::collection::vec(-3.0f64..3.0, 2),
        shape in 0.2f64..5.0,
        intercept in -2.0f64..2.0,
    ) {
        let grid = TimeGrid::new(vec![0.1, 0.5, 1.0, 2.0, 4.0, 8.0]).unwrap();
        let base = StepCurve::new(vec![0.3, 1.0, 3.0], vec![0.1, 0.4, 1.5], CurveKind::Chf).unwrap();
        let cox = CoxModel::new(beta.clone(), base, vec![0.0, 0.0]).unwrap();
        let weib = WeibullAftModel::new(shape, intercept, beta).unwrap();
        let models: [&dyn SurvivalModel; 2] = [&cox, &weib];
        for m in models {
            let s = predict_survival(m, &x, &grid).unwrap();
            prop_assert!(s.values().iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert!(s.values().windows(2).all(|w| w[1] <= w[0]));
        }
        let h = cox.cumulative_hazard(&x, grid.points());
        prop_assert!(h.iter().all(|v| *v >= 0.0));
        prop_assert!(h.windows(2).all(|w| w[1] >= w[0]));
        let h = weib.cumulative_hazard(&x, grid.points());
        prop_assert!(h.windows(2).all(|w| w[1] >= w[0]));
    }
}
