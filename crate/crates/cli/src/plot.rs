//! Turning artifacts into line-chart series.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use survival_explain::global::ProfileSurface;
use survival_explain::metrics::{LossValue, MetricCurve};

use crate::args::{CommonArgs, PlotArgs};
use crate::artifact::{read_envelope, to_json, write_text, Envelope, RawEnvelope, TOOL_VERSION};
use crate::commands::{
    DiagnosticsResult, IceResult, PartsResult, PerformanceResult, PredictResult, ShapResult,
    SurvshapGlobalResult,
};
use crate::error::{CliError, CliResult};
use crate::svg::{render, Chart, Series};

pub const PLOTTABLE: [&str; 9] = [
    "predict",
    "performance",
    "parts",
    "profile",
    "profile2d",
    "diagnostics",
    "shap",
    "ice",
    "survshap-global",
];

fn not_plottable(command: &str, why: &str) -> CliError {
    CliError::input(format!(
        "'{command}' artifact {why}; plottable commands: {} (parts only with a curve loss, predict/profile/ice not with risk output)",
        PLOTTABLE.join(", ")
    ))
}

fn label(v: f64) -> String {
    format!("{v}")
}

fn metric_series(curve: &MetricCurve) -> Series {
    let (x, y) = curve
        .grid
        .points()
        .iter()
        .zip(&curve.values)
        .filter_map(|(t, v)| v.map(|v| (*t, v)))
        .unzip();
    Series {
        label: curve.metric.clone(),
        x,
        y,
    }
}

fn profile_series(surface: &ProfileSurface) -> CliResult<(Vec<Series>, String)> {
    let names = &surface.variables;
    let grids = &surface.grid_values;
    let Some(times) = &surface.times else {
        // risk output: one curve along the first variable (per level of the second)
        let x = grids[0].clone();
        let series = if grids.len() == 1 {
            vec![Series {
                label: format!("{} risk", names[0]),
                x,
                y: surface.values.iter().map(|v| v[0]).collect(),
            }]
        } else {
            (0..grids[1].len())
                .map(|b| Series {
                    label: format!("{}={}", names[1], label(grids[1][b])),
                    x: x.clone(),
                    y: (0..grids[0].len())
                        .map(|a| surface.curve(&[a, b])[0])
                        .collect(),
                })
                .collect()
        };
        return Ok((series, names[0].clone()));
    };
    let mut series = Vec::with_capacity(surface.values.len());
    for (flat, values) in surface.values.iter().enumerate() {
        let label = if grids.len() == 1 {
            format!("{}={}", names[0], label(grids[0][flat]))
        } else {
            let nb = grids[1].len();
            format!(
                "{}={}, {}={}",
                names[0],
                label(grids[0][flat / nb]),
                names[1],
                label(grids[1][flat % nb])
            )
        };
        series.push(Series {
            label,
            x: times.points().to_vec(),
            y: values.clone(),
        });
    }
    Ok((series, "time".to_string()))
}

/// Series, x label and y label of one artifact.
fn artifact_series(env: &RawEnvelope) -> CliResult<(Vec<Series>, String, String)> {
    let time = || "time".to_string();
    match env.command.as_str() {
        "predict" => {
            let r: PredictResult = env.result_as()?;
            let Some(times) = r.times else {
                return Err(not_plottable("predict", "holds risk scores only"));
            };
            let series = r
                .rows
                .iter()
                .zip(r.values)
                .map(|(row, y)| Series {
                    label: format!("row {row}"),
                    x: times.clone(),
                    y,
                })
                .collect();
            Ok((series, time(), r.output_type.to_string()))
        }
        "performance" => {
            let r: PerformanceResult = env.result_as()?;
            Ok((
                vec![metric_series(&r.brier_score), metric_series(&r.cd_auc)],
                time(),
                "metric".to_string(),
            ))
        }
        "parts" => {
            let r: PartsResult = env.result_as()?;
            let grid = env
                .grid
                .as_ref()
                .ok_or_else(|| not_plottable("parts", "has no time grid"))?;
            let mut series = Vec::new();
            for v in &r.variables {
                let LossValue::Curve(c) = &v.importance else {
                    return Err(not_plottable("parts", "holds scalar importances"));
                };
                let (x, y) = grid
                    .points()
                    .iter()
                    .zip(c)
                    .filter_map(|(t, v)| v.map(|v| (*t, v)))
                    .unzip();
                series.push(Series {
                    label: v.variable.clone(),
                    x,
                    y,
                });
            }
            Ok((series, time(), format!("{} increase", r.loss)))
        }
        "profile" | "profile2d" => {
            let surface: ProfileSurface = env.result_as()?;
            let (series, x_label) = profile_series(&surface)?;
            Ok((
                series,
                x_label,
                format!("{} {}", surface.method, surface.output_type),
            ))
        }
        "diagnostics" => {
            let r: DiagnosticsResult = env.result_as()?;
            let check = r
                .cox_snell_check
                .ok_or_else(|| not_plottable("diagnostics", "has no events to check"))?;
            Ok((
                vec![
                    Series {
                        label: "Kaplan-Meier of Cox-Snell residuals".to_string(),
                        x: check.residuals.clone(),
                        y: check.kaplan_meier,
                    },
                    Series {
                        label: "exp(-r)".to_string(),
                        x: check.residuals,
                        y: check.reference,
                    },
                ],
                "Cox-Snell residual".to_string(),
                "survival".to_string(),
            ))
        }
        "shap" => {
            let r: ShapResult = env.result_as()?;
            let e = r.explanation;
            let series = e
                .variables
                .iter()
                .zip(e.phi)
                .map(|(name, y)| Series {
                    label: name.clone(),
                    x: e.times.points().to_vec(),
                    y,
                })
                .collect();
            Ok((series, time(), "SurvSHAP(t)".to_string()))
        }
        "ice" => {
            let r: IceResult = env.result_as()?;
            let e = r.explanation;
            let Some(times) = e.times else {
                let series = vec![Series {
                    label: format!("row {}", r.row),
                    x: e.grid_values,
                    y: e.curves.iter().map(|c| c[0]).collect(),
                }];
                return Ok((series, e.variable, "risk".to_string()));
            };
            let series = e
                .grid_values
                .iter()
                .zip(e.curves)
                .map(|(v, y)| Series {
                    label: format!("{}={}", e.variable, label(*v)),
                    x: times.points().to_vec(),
                    y,
                })
                .collect();
            Ok((series, time(), e.output_type.to_string()))
        }
        "survshap-global" => {
            let r: SurvshapGlobalResult = env.result_as()?;
            let e = r.explanation;
            let series = e
                .variables
                .iter()
                .zip(e.mean_abs_phi)
                .map(|(name, y)| Series {
                    label: name.clone(),
                    x: e.times.points().to_vec(),
                    y,
                })
                .collect();
            Ok((series, time(), "mean |SurvSHAP(t)|".to_string()))
        }
        other => Err(not_plottable(other, "has no curves")),
    }
}

/// One chart from one or more artifacts; with several inputs each label is prefixed
/// by its artifact's command and model.
pub fn chart_for(envelopes: &[RawEnvelope]) -> CliResult<Chart> {
    let first = envelopes
        .first()
        .ok_or_else(|| CliError::input("plot needs at least one --input"))?;
    let mut series = Vec::new();
    let mut labels = (String::new(), String::new());
    for (k, env) in envelopes.iter().enumerate() {
        let (mut s, x_label, y_label) = artifact_series(env)?;
        if k == 0 {
            labels = (x_label, y_label);
        }
        if envelopes.len() > 1 {
            let model = env.config_str("model").unwrap_or("model");
            for item in &mut s {
                item.label = format!("{model} {}: {}", env.command, item.label);
            }
        }
        series.extend(s);
    }
    let title = if envelopes.len() == 1 {
        format!(
            "{} ({})",
            first.command,
            first.config_str("model").unwrap_or("model")
        )
    } else {
        format!("{} artifacts", envelopes.len())
    };
    Ok(Chart {
        title,
        x_label: labels.0,
        y_label: labels.1,
        series,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PlotConfig {
    input: Vec<PathBuf>,
}

/// `plot`: read artifacts, write `plot.svg` and the plotted series as `plot.json`.
pub fn run_plot(common: &CommonArgs, args: &PlotArgs) -> CliResult<Vec<PathBuf>> {
    let envelopes = args
        .input
        .iter()
        .map(|p| read_envelope(p))
        .collect::<CliResult<Vec<_>>>()?;
    let chart = chart_for(&envelopes)?;
    let json = to_json(&Envelope {
        tool_version: TOOL_VERSION.to_string(),
        command: "plot".to_string(),
        config: PlotConfig {
            input: args.input.clone(),
        },
        grid: None::<survival_explain::TimeGrid>,
        result: &chart,
    })?;
    Ok(vec![
        write_text(&common.out, "plot.json", &json)?,
        write_text(&common.out, "plot.svg", &render(&chart))?,
    ])
}
