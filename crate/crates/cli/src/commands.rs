//! Command dispatch: load data, fit the model, run one explanation, write the artifact.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use survival_explain::global::{
    model_diagnostics, model_parts, model_profile, model_profile_2d, ProfileOptions,
    ProfileSurface, ResidualSet, VariableImportance,
};
use survival_explain::local::{
    model_survshap, predict_parts_survlime, predict_parts_survshap, predict_profile,
    GlobalSurvShap, IceProfile, LimeOptions, ShapMethod, ShapOptions, SurvLimeResult,
    SurvShapResult,
};
use survival_explain::metrics::{
    brier_score, cd_auc, concordance_index, roc_at_time, Loss, LossKind, LossValue, MetricCurve,
    RocCurve,
};
use survival_explain::stats::subsample_indices;
use survival_explain::{
    chf_from_survival, fit_cox, fit_weibull_aft, kaplan_meier, Explainer, FitOptions,
    KaplanMeierModel, OutputType, ReferenceModel, SurvivalDataset,
};

use crate::args::{Cli, CommandArgs, CommonArgs, ModelKind};
use crate::artifact::{parse_envelope, to_json, write_text, Envelope, TOOL_VERSION};
use crate::error::{CliError, CliResult};
use crate::ingest::ingest_csv;
use crate::plot::{chart_for, run_plot};
use crate::svg::render;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: ReferenceModel,
    pub n_observations: usize,
    pub n_events: usize,
    pub feature_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResult {
    pub output_type: OutputType,
    pub rows: Vec<usize>,
    /// Evaluation times; `None` for risk output.
    pub times: Option<Vec<f64>>,
    /// One curve per row, or a single risk value per row.
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceResult {
    pub brier_score: MetricCurve,
    pub cd_auc: MetricCurve,
    pub c_index: f64,
    pub roc: Vec<RocCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartsResult {
    pub loss: LossKind,
    pub variables: Vec<VariableImportance>,
    /// Permuted loss over baseline loss per variable, when requested.
    pub ratios: Option<Vec<LossValue>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxSnellCheck {
    /// Sorted distinct Cox-Snell residuals of events.
    pub residuals: Vec<f64>,
    pub kaplan_meier: Vec<f64>,
    /// `exp(-r)`, the unit exponential survival a well-specified model should match.
    pub reference: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsResult {
    pub residuals: ResidualSet,
    pub cox_snell_check: Option<CoxSnellCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult<T> {
    pub row: usize,
    pub explanation: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvshapGlobalResult {
    pub rows: Vec<usize>,
    pub explanation: GlobalSurvShap,
}

pub type ShapResult = InstanceResult<SurvShapResult>;
pub type LimeResult = InstanceResult<SurvLimeResult>;
pub type IceResult = InstanceResult<IceProfile>;

/// Settings echoed into every artifact.
#[derive(Debug, Clone, Serialize)]
struct Config<'a> {
    #[serde(flatten)]
    common: &'a CommonArgs,
    #[serde(flatten)]
    command: &'a CommandArgs,
}

/// Run one invocation and return the paths written.
pub fn run(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    if let CommandArgs::Plot(args) = &cli.command {
        return run_plot(&cli.common, args);
    }
    let common = &cli.common;
    let data_path = common
        .data
        .as_ref()
        .ok_or_else(|| CliError::input("--data is required"))?;
    let data = ingest_csv(data_path, &common.time_col, &common.event_col)?;
    let model = fit_model(&data, common.model)?;
    if let Some(msg) = convergence_warning(&model) {
        eprintln!("warning: {msg}");
    }
    let explainer = Explainer::new(model.clone(), data.clone(), None)?;
    let seed = common.seed;
    let text = match &cli.command {
        CommandArgs::Fit => envelope(
            cli,
            &explainer,
            &FitResult {
                model,
                n_observations: data.n_rows(),
                n_events: data.n_events(),
                feature_names: data.feature_names().to_vec(),
            },
        )?,
        CommandArgs::Predict(args) => {
            let rows = match args.row {
                Some(r) => vec![check_row(&data, r)?],
                None => (0..data.n_rows()).collect(),
            };
            envelope(
                cli,
                &explainer,
                &predict(&explainer, &data, rows, args.output_type, &common.at_time)?,
            )?
        }
        CommandArgs::Performance => {
            let grid = explainer.grid().clone();
            let roc = sorted_times(&common.at_time)
                .into_iter()
                .map(|t| roc_at_time(&explainer, &data, t))
                .collect::<Result<Vec<_>, _>>()?;
            envelope(
                cli,
                &explainer,
                &PerformanceResult {
                    brier_score: brier_score(&explainer, &data, &grid)?,
                    cd_auc: cd_auc(&explainer, &data, &grid)?,
                    c_index: concordance_index(&explainer, &data)?,
                    roc,
                },
            )?
        }
        CommandArgs::Parts(args) => {
            let variables = model_parts(
                &explainer,
                Loss { kind: args.loss },
                args.n_permutations,
                seed,
            )?;
            let ratios = if args.ratio {
                Some(
                    variables
                        .iter()
                        .map(|v| v.permuted_loss.ratio(&v.baseline_loss))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            } else {
                None
            };
            envelope(
                cli,
                &explainer,
                &PartsResult {
                    loss: args.loss,
                    variables,
                    ratios,
                },
            )?
        }
        CommandArgs::Profile(args) => {
            let opts = ProfileOptions {
                grid_size: args.grid_size,
                n_background: args.n_background,
                output_type: args.output_type,
                seed,
            };
            let surface: ProfileSurface =
                model_profile(&explainer, &args.variable, args.method, opts)?;
            envelope(cli, &explainer, &surface)?
        }
        CommandArgs::Profile2d(args) => {
            let [a, b] = args.variable.as_slice() else {
                return Err(CliError::input(format!(
                    "profile2d needs exactly two --variable flags, got {}",
                    args.variable.len()
                )));
            };
            let opts = ProfileOptions {
                grid_size: args.grid_size,
                n_background: args.n_background,
                output_type: args.output_type,
                seed,
            };
            envelope(
                cli,
                &explainer,
                &model_profile_2d(&explainer, (a, b), opts)?,
            )?
        }
        CommandArgs::Diagnostics => {
            let residuals = model_diagnostics(&explainer, &data)?;
            let cox_snell_check = cox_snell_check(&residuals)?;
            envelope(
                cli,
                &explainer,
                &DiagnosticsResult {
                    residuals,
                    cox_snell_check,
                },
            )?
        }
        CommandArgs::Shap(args) => {
            let row = check_row(&data, args.row)?;
            let opts = shap_options(args.method, args.n_background, args.n_permutations, seed)?;
            let explanation = predict_parts_survshap(&explainer, data.features().row(row), opts)?;
            envelope(cli, &explainer, &ShapResult { row, explanation })?
        }
        CommandArgs::Lime(args) => {
            let row = check_row(&data, args.row)?;
            let opts = LimeOptions {
                n_neighbors: args.n_neighbors,
                seed,
            };
            let explanation = predict_parts_survlime(&explainer, data.features().row(row), opts)?;
            envelope(cli, &explainer, &LimeResult { row, explanation })?
        }
        CommandArgs::Ice(args) => {
            let row = check_row(&data, args.row)?;
            let explanation = predict_profile(
                &explainer,
                data.features().row(row),
                &args.variable,
                args.grid_size,
                args.output_type,
            )?;
            envelope(cli, &explainer, &IceResult { row, explanation })?
        }
        CommandArgs::SurvshapGlobal(args) => {
            if args.n_instances == 0 {
                return Err(CliError::input("--n-instances must be at least 1"));
            }
            let mut rows = subsample_indices(data.n_rows(), args.n_instances, seed);
            rows.sort_unstable();
            let opts = shap_options(args.method, args.n_background, args.n_permutations, seed)?;
            let explanation =
                model_survshap(&explainer, &data.features().select_rows(&rows), opts)?;
            envelope(cli, &explainer, &SurvshapGlobalResult { rows, explanation })?
        }
        CommandArgs::Plot(_) => unreachable!("handled above"),
    };
    emit(cli, &text)
}

fn emit(cli: &Cli, json: &str) -> CliResult<Vec<PathBuf>> {
    let name = cli.command.name();
    let mut written = vec![write_text(&cli.common.out, &format!("{name}.json"), json)?];
    if cli.common.svg {
        let chart = chart_for(&[parse_envelope(json)?])?;
        written.push(write_text(
            &cli.common.out,
            &format!("{name}.svg"),
            &render(&chart),
        )?);
    }
    Ok(written)
}

fn envelope<R: Serialize>(cli: &Cli, explainer: &Explainer, result: &R) -> CliResult<String> {
    to_json(&Envelope {
        tool_version: TOOL_VERSION.to_string(),
        command: cli.command.name().to_string(),
        config: Config {
            common: &cli.common,
            command: &cli.command,
        },
        grid: Some(explainer.grid().clone()),
        result,
    })
}

pub fn fit_model(data: &SurvivalDataset, kind: ModelKind) -> CliResult<ReferenceModel> {
    let opts = FitOptions::default();
    Ok(match kind {
        ModelKind::Km => ReferenceModel::Km(KaplanMeierModel::fit(data)?),
        ModelKind::Cox => ReferenceModel::Cox(fit_cox(data, opts)?),
        ModelKind::WeibullAft => ReferenceModel::WeibullAft(fit_weibull_aft(data, opts)?),
    })
}

fn convergence_warning(model: &ReferenceModel) -> Option<String> {
    let (name, converged, iterations) = match model {
        ReferenceModel::Km(_) => return None,
        ReferenceModel::Cox(m) => ("Cox", m.converged, m.iterations),
        ReferenceModel::WeibullAft(m) => ("Weibull AFT", m.converged, m.iterations),
    };
    (!converged).then(|| {
        format!(
            "{name} fit did not converge after {iterations} iterations (coefficients may diverge)"
        )
    })
}

fn check_row(data: &SurvivalDataset, row: usize) -> CliResult<usize> {
    if row < data.n_rows() {
        Ok(row)
    } else {
        Err(CliError::input(format!(
            "--row {row} is out of range (dataset has {} rows, indices start at 0)",
            data.n_rows()
        )))
    }
}

fn sorted_times(times: &[f64]) -> Vec<f64> {
    let mut t = times.to_vec();
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

fn predict(
    explainer: &Explainer,
    data: &SurvivalDataset,
    rows: Vec<usize>,
    output_type: OutputType,
    at_time: &[f64],
) -> CliResult<PredictResult> {
    let times = if at_time.is_empty() {
        explainer.grid().points().to_vec()
    } else {
        let t = sorted_times(at_time);
        if let Some(bad) = t.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(CliError::input(format!(
                "--at-time must be finite and nonnegative, got {bad}"
            )));
        }
        t
    };
    let values = rows
        .iter()
        .map(|&r| {
            let x = data.features().row(r);
            Ok(match output_type {
                OutputType::Survival => explainer.survival_at(x, &times)?,
                OutputType::Chf => explainer
                    .survival_at(x, &times)?
                    .into_iter()
                    .map(chf_from_survival)
                    .collect(),
                OutputType::Risk => vec![explainer.risk(x)?],
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(PredictResult {
        output_type,
        rows,
        times: (output_type != OutputType::Risk).then_some(times),
        values,
    })
}

fn shap_options(
    method: ShapMethod,
    n_background: usize,
    n_permutations: usize,
    seed: u64,
) -> CliResult<ShapOptions> {
    if method != ShapMethod::Exact && n_permutations < 2 {
        // one ordering gives no standard error, which JSON cannot represent
        return Err(CliError::input("--n-permutations must be at least 2"));
    }
    Ok(ShapOptions {
        n_background,
        method,
        n_permutations,
        seed,
    })
}

fn cox_snell_check(residuals: &ResidualSet) -> CliResult<Option<CoxSnellCheck>> {
    if !residuals.events.iter().any(|e| *e) {
        return Ok(None);
    }
    let data =
        SurvivalDataset::without_features(residuals.cox_snell.clone(), residuals.events.clone())?;
    let km = kaplan_meier(&data)?;
    let grid: Vec<f64> = km.times().to_vec();
    Ok(Some(CoxSnellCheck {
        kaplan_meier: km.values().to_vec(),
        reference: grid.iter().map(|r| (-r).exp()).collect(),
        residuals: grid,
    }))
}
