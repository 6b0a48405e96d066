mod common;

use common::{assert_close, cox_data, dataset};
use survival_explain::local::{
    ice_curves, model_survshap, predict_parts_survlime, predict_parts_survshap, predict_profile,
    LimeOptions, ShapMethod, ShapOptions,
};
use survival_explain::{
    nelson_aalen, CoxModel, Explainer, FnModel, OutputType, SurvivalDataset, TimeGrid,
};

/// Nonlinear, non-additive survival model in three features; x3 is ignored.
fn interacting_model() -> impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync {
    |x: &[f64], t: &[f64]| {
        let lp = 0.6 * x[0] - 0.4 * x[1] + 0.5 * x[0] * x[1];
        t.iter()
            .map(|s| (-(0.3 * s).powf(1.3) * lp.exp()).exp())
            .collect()
    }
}

fn small_background() -> SurvivalDataset {
    dataset(
        &[1.0, 2.5, 3.0, 4.5, 6.0, 7.0],
        &[1, 1, 0, 1, 1, 0],
        &[
            vec![0.1, -0.5, 2.0],
            vec![1.2, 0.3, -1.0],
            vec![-0.7, 0.9, 0.0],
            vec![0.4, -1.1, 0.5],
            vec![-1.5, 0.2, 1.5],
            vec![0.8, 1.4, -0.3],
        ],
    )
}

fn explainer() -> Explainer {
    Explainer::new(
        FnModel::new("interacting", interacting_model()).with_n_features(3),
        small_background(),
        None,
    )
    .unwrap()
}

fn exact_opts() -> ShapOptions {
    ShapOptions {
        method: ShapMethod::Exact,
        n_background: usize::MAX,
        ..ShapOptions::default()
    }
}

/// Coalition value by direct averaging over every background row.
fn coalition_value(e: &Explainer, x: &[f64], members: &[usize]) -> Vec<f64> {
    let bg = e.background().features();
    let mut acc = vec![0.0; e.grid().len()];
    for row in bg.rows() {
        let z: Vec<f64> = (0..x.len())
            .map(|j| if members.contains(&j) { x[j] } else { row[j] })
            .collect();
        for (a, s) in acc.iter_mut().zip(e.survival(&z).unwrap()) {
            *a += s;
        }
    }
    acc.iter().map(|a| a / bg.n_rows() as f64).collect()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, *first);
            out.push(tail);
        }
    }
    out
}

/// Shapley values from the ordering definition: average marginal contribution over all p! orders.
fn brute_force_shapley(e: &Explainer, x: &[f64]) -> Vec<Vec<f64>> {
    let p = x.len();
    let orders = permutations(&(0..p).collect::<Vec<_>>());
    let mut phi = vec![vec![0.0; e.grid().len()]; p];
    for order in &orders {
        for (pos, &j) in order.iter().enumerate() {
            let before = coalition_value(e, x, &order[..pos]);
            let after = coalition_value(e, x, &order[..=pos]);
            for (k, v) in phi[j].iter_mut().enumerate() {
                *v += (after[k] - before[k]) / orders.len() as f64;
            }
        }
    }
    phi
}

#[test]
fn exact_survshap_matches_ordering_oracle() {
    let e = explainer();
    for x in [[0.5, -0.2, 1.0], [-1.0, 1.3, 0.0], [2.0, 0.7, -2.0]] {
        let r = predict_parts_survshap(&e, &x, exact_opts()).unwrap();
        assert_eq!(r.method, ShapMethod::Exact);
        assert_eq!(r.n_samples, 8);
        let oracle = brute_force_shapley(&e, &x);
        for j in 0..3 {
            for k in 0..e.grid().len() {
                assert_close(r.phi[j][k], oracle[j][k], 1e-12, "phi");
            }
        }
    }
}

#[test]
fn exact_survshap_two_features_matches_oracle() {
    let bg = dataset(
        &[1.0, 2.0, 3.0],
        &[1, 1, 1],
        &[vec![0.0, 1.0], vec![1.0, -1.0], vec![0.5, 0.5]],
    );
    let model = FnModel::new("two", |x: &[f64], t: &[f64]| {
        t.iter()
            .map(|s| (-s * (0.2 + x[0] * x[0] + 0.3 * x[0] * x[1]).exp()).exp())
            .collect()
    });
    let e = Explainer::new(model.with_n_features(2), bg, None).unwrap();
    let x = [0.9, -0.4];
    let r = predict_parts_survshap(&e, &x, exact_opts()).unwrap();
    let oracle = brute_force_shapley(&e, &x);
    for j in 0..2 {
        for k in 0..e.grid().len() {
            assert_close(r.phi[j][k], oracle[j][k], 1e-12, "phi");
        }
    }
}

#[test]
fn efficiency_and_null_player() {
    let e = explainer();
    for x in [[0.5, -0.2, 1.0], [-1.0, 1.3, 0.0]] {
        let r = predict_parts_survshap(&e, &x, exact_opts()).unwrap();
        for k in 0..e.grid().len() {
            let total: f64 = (0..3).map(|j| r.phi[j][k]).sum();
            assert!((total - (r.prediction[k] - r.baseline[k])).abs() < 1e-10);
        }
        assert!(r.phi[2].iter().all(|v| *v == 0.0));
        assert_eq!(r.aggregate[2], 0.0);
    }
}

#[test]
fn single_feature_attribution_is_the_full_gap() {
    let bg = dataset(
        &[1.0, 2.0, 3.0],
        &[1, 0, 1],
        &[vec![0.0], vec![1.0], vec![-1.0]],
    );
    let model = FnModel::new("one", |x: &[f64], t: &[f64]| {
        t.iter().map(|s| (-s * x[0].exp()).exp()).collect()
    });
    let e = Explainer::new(model.with_n_features(1), bg, None).unwrap();
    let r = predict_parts_survshap(&e, &[0.7], exact_opts()).unwrap();
    for k in 0..e.grid().len() {
        assert_eq!(r.phi[0][k], r.prediction[k] - r.baseline[k]);
    }
}

fn symmetric_explainer() -> Explainer {
    let model = FnModel::new("symmetric", |x: &[f64], t: &[f64]| {
        let lp = 0.5 * (x[0] + x[1]) + 0.3 * x[0] * x[1] - 0.2 * x[2];
        t.iter().map(|s| (-0.4 * s * lp.exp()).exp()).collect()
    });
    // exchangeable columns: x1 and x2 coincide in every background row
    let bg = dataset(
        &[1.0, 2.0, 3.5, 4.0, 5.0],
        &[1, 1, 0, 1, 1],
        &[
            vec![0.2, 0.2, 1.0],
            vec![-1.0, -1.0, 0.0],
            vec![0.7, 0.7, -0.5],
            vec![1.5, 1.5, 2.0],
            vec![-0.3, -0.3, 0.3],
        ],
    );
    Explainer::new(model.with_n_features(3), bg, None).unwrap()
}

#[test]
fn exchangeable_features_get_identical_exact_attributions() {
    let e = symmetric_explainer();
    let r = predict_parts_survshap(&e, &[0.9, 0.9, -0.4], exact_opts()).unwrap();
    assert_eq!(r.phi[0], r.phi[1]);
    assert!(r.phi[0].iter().any(|v| *v != 0.0));
}

fn five_feature_explainer() -> Explainer {
    let model = FnModel::new("five", |x: &[f64], t: &[f64]| {
        let lp =
            0.7 * x[0] - 0.5 * x[1] + 0.4 * x[2] * x[3] + 0.3 * x[4] * x[4] - 0.2 * x[0] * x[4];
        t.iter()
            .map(|s| (-(0.25 * s).powf(1.2) * lp.exp()).exp())
            .collect()
    });
    let d = cox_data(12, &[0.5, -0.5, 0.2, 0.0, 0.3], 0.3, 0.1, 17);
    let grid = TimeGrid::new(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
    Explainer::new(model.with_n_features(5), d, Some(grid)).unwrap()
}

#[test]
fn sampled_survshap_mean_over_seeds_matches_exact() {
    let e = five_feature_explainer();
    let x = [0.8, -1.2, 0.5, 1.1, -0.6];
    let exact = predict_parts_survshap(&e, &x, exact_opts()).unwrap();
    let runs: Vec<_> = (0..20u64)
        .map(|seed| {
            let opts = ShapOptions {
                method: ShapMethod::Sampling,
                n_permutations: 30,
                seed,
                ..exact_opts()
            };
            predict_parts_survshap(&e, &x, opts).unwrap()
        })
        .collect();
    assert!(runs
        .iter()
        .all(|r| r.method == ShapMethod::Sampling && r.standard_error.is_some()));
    for j in 0..5 {
        for k in 0..e.grid().len() {
            let values: Vec<f64> = runs.iter().map(|r| r.phi[j][k]).collect();
            let mean = values.iter().sum::<f64>() / 20.0;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 19.0;
            let se = (var / 20.0).sqrt();
            let delta = (mean - exact.phi[j][k]).abs();
            assert!(
                delta < 3.0 * se,
                "feature {j} time {k}: |delta| {delta} vs 3 SE {}",
                3.0 * se
            );
        }
    }
}

#[test]
fn sampled_survshap_reproducible_and_symmetric_within_tolerance() {
    let e = symmetric_explainer();
    let opts = ShapOptions {
        method: ShapMethod::Sampling,
        n_permutations: 200,
        seed: 3,
        ..exact_opts()
    };
    let x = [0.9, 0.9, -0.4];
    let a = predict_parts_survshap(&e, &x, opts).unwrap();
    assert_eq!(a, predict_parts_survshap(&e, &x, opts).unwrap());
    let se = a.standard_error.as_ref().unwrap();
    for k in 0..e.grid().len() {
        let tol = 3.0 * (se[0][k].powi(2) + se[1][k].powi(2)).sqrt();
        assert!((a.phi[0][k] - a.phi[1][k]).abs() <= tol);
    }
}

#[test]
fn survshap_rejects_bad_input() {
    let e = explainer();
    assert!(predict_parts_survshap(&e, &[0.0, 1.0], exact_opts()).is_err());
    let opts = ShapOptions {
        method: ShapMethod::Sampling,
        n_permutations: 0,
        ..exact_opts()
    };
    assert!(predict_parts_survshap(&e, &[0.0, 1.0, 2.0], opts).is_err());
}

#[test]
fn global_survshap_aggregates() {
    let e = explainer();
    let x = survival_explain::Matrix::from_rows(&[vec![0.5, -0.2, 1.0]]).unwrap();
    let g = model_survshap(&e, &x, exact_opts()).unwrap();
    let single = predict_parts_survshap(&e, x.row(0), exact_opts()).unwrap();
    assert_eq!(g.importance, single.aggregate);
    assert_eq!(g.per_instance[0], single);

    let rows = e.background().features().clone();
    let g = model_survshap(&e, &rows, exact_opts()).unwrap();
    assert_eq!(g.importance[2], 0.0);
    assert_eq!(*g.ranking().last().unwrap(), 2);
    assert_eq!(g.beeswarm.len(), rows.n_rows() * 3);
    assert!(g.mean_abs_phi[2].iter().all(|v| *v == 0.0));
}

fn lime_background(constant_last: bool) -> SurvivalDataset {
    let d = cox_data(300, &[0.8, -0.5, 0.0], 0.3, 0.1, 31);
    if !constant_last {
        return d;
    }
    let rows: Vec<Vec<f64>> = d.features().rows().map(|r| vec![r[0], r[1], 1.0]).collect();
    SurvivalDataset::from_rows(d.times().to_vec(), d.events().to_vec(), &rows).unwrap()
}

fn known_cox(bg: &SurvivalDataset, beta: Vec<f64>) -> Explainer {
    let baseline = nelson_aalen(bg).unwrap();
    let p = beta.len();
    let model = CoxModel::new(beta, baseline, vec![0.0; p]).unwrap();
    Explainer::new(model, bg.clone(), None).unwrap()
}

#[test]
fn survlime_recovers_cox_coefficients() {
    let bg = lime_background(false);
    let beta = vec![0.8, -0.5, 0.0];
    let e = known_cox(&bg, beta.clone());
    let opts = LimeOptions {
        n_neighbors: 500,
        seed: 42,
    };
    let r = predict_parts_survlime(&e, &[0.3, -0.2, 0.5], opts).unwrap();
    for j in 0..3 {
        assert!(
            (r.surrogate_beta[j] - beta[j]).abs() < 0.1,
            "{:?}",
            r.surrogate_beta
        );
    }
    assert!(r.surrogate_beta[2].abs() < 0.05);
    assert!(r.fit_residual <= r.null_residual);
    assert!(!r.degenerate);
    assert_eq!(
        r,
        predict_parts_survlime(&e, &[0.3, -0.2, 0.5], opts).unwrap()
    );
}

#[test]
fn survlime_holds_constant_features_at_zero() {
    let bg = lime_background(true);
    let e = known_cox(&bg, vec![0.8, -0.5, 0.4]);
    let r = predict_parts_survlime(&e, &[0.0, 0.0, 1.0], LimeOptions::default()).unwrap();
    assert_eq!(r.surrogate_beta[2], 0.0);
    assert!(r.fit_residual <= r.null_residual);
    assert!(predict_parts_survlime(&e, &[0.0, 0.0], LimeOptions::default()).is_err());
}

#[test]
fn survlime_on_nonlinear_model_still_reduces_residual() {
    let e = explainer();
    let r = predict_parts_survlime(&e, &[0.5, -0.2, 1.0], LimeOptions::default()).unwrap();
    assert!(r.fit_residual <= r.null_residual);
    assert!(r.kernel_width > 0.0);
}

#[test]
fn ice_profile_contains_the_prediction() {
    let e = explainer();
    let x = [0.37, -0.2, 1.0];
    for output_type in [OutputType::Survival, OutputType::Chf, OutputType::Risk] {
        let ice = predict_profile(&e, &x, "x1", 5, output_type).unwrap();
        let at = ice.grid_values.iter().position(|v| *v == 0.37).unwrap();
        assert_eq!(ice.curves[at], e.output(&x, output_type).unwrap());
        assert!(ice.grid_values.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ice.times.is_none(), output_type == OutputType::Risk);
    }
    let flat = ice_curves(&e, &x, 2, &[-5.0, 0.0, 5.0], OutputType::Survival).unwrap();
    assert!(flat.iter().all(|c| c == &flat[0]));
    assert!(predict_profile(&e, &x, "nope", 5, OutputType::Survival).is_err());
}
