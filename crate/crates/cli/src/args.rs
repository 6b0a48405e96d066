use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use survival_explain::global::ProfileMethod;
use survival_explain::local::ShapMethod;
use survival_explain::metrics::LossKind;
use survival_explain::OutputType;

/// Explain survival models fitted to a CSV dataset; results are written as JSON.
///
/// No environment variables are read; every setting comes from flags.
#[derive(Debug, Parser)]
#[command(name = "survival-explain", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModelKind {
    Km,
    Cox,
    WeibullAft,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CommonArgs {
    /// Input CSV with a header row.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    #[arg(long, global = true, default_value = "time")]
    pub time_col: String,
    #[arg(long, global = true, default_value = "event")]
    pub event_col: String,
    #[arg(long, global = true, value_enum, default_value_t = ModelKind::Cox)]
    pub model: ModelKind,
    /// Time points for `predict` and the ROC curves of `performance` (repeatable).
    #[arg(long = "at-time", global = true)]
    pub at_time: Vec<f64>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Output directory; not echoed into artifacts.
    #[arg(long, global = true, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
    /// Also render `<command>.svg`.
    #[arg(long, global = true)]
    pub svg: bool,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum CommandArgs {
    /// Fit the model and dump its parameters.
    Fit,
    /// Survival, cumulative hazard or risk predictions.
    Predict(PredictArgs),
    /// Brier score, cumulative/dynamic AUC, C-index and ROC curves.
    Performance,
    /// Permutation variable importance.
    Parts(PartsArgs),
    /// PDP or ALE profile of one variable.
    Profile(ProfileArgs),
    /// Two-variable partial dependence.
    Profile2d(Profile2dArgs),
    /// Cox-Snell, martingale and deviance residuals.
    Diagnostics,
    /// SurvSHAP(t) attributions for one instance.
    Shap(ShapArgs),
    /// SurvLIME surrogate for one instance.
    Lime(LimeArgs),
    /// ICE profile for one instance.
    Ice(IceArgs),
    /// SurvSHAP(t) over several instances with global importance.
    SurvshapGlobal(SurvshapGlobalArgs),
    /// Render artifact JSON files as one SVG line chart.
    Plot(PlotArgs),
}

impl CommandArgs {
    pub fn name(&self) -> &'static str {
        match self {
            CommandArgs::Fit => "fit",
            CommandArgs::Predict(_) => "predict",
            CommandArgs::Performance => "performance",
            CommandArgs::Parts(_) => "parts",
            CommandArgs::Profile(_) => "profile",
            CommandArgs::Profile2d(_) => "profile2d",
            CommandArgs::Diagnostics => "diagnostics",
            CommandArgs::Shap(_) => "shap",
            CommandArgs::Lime(_) => "lime",
            CommandArgs::Ice(_) => "ice",
            CommandArgs::SurvshapGlobal(_) => "survshap-global",
            CommandArgs::Plot(_) => "plot",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    /// Single row to predict; all rows when omitted.
    #[arg(long)]
    pub row: Option<usize>,
    #[arg(long, default_value = "survival")]
    pub output_type: OutputType,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PartsArgs {
    #[arg(long, default_value = "brier_integrated")]
    pub loss: LossKind,
    #[arg(long, default_value_t = 10)]
    pub n_permutations: usize,
    /// Also report permuted / baseline loss ratios.
    #[arg(long)]
    pub ratio: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProfileArgs {
    #[arg(long)]
    pub variable: String,
    #[arg(long, default_value = "pdp")]
    pub method: ProfileMethod,
    /// Grid points (PDP, default 25) or bins (ALE, default 10).
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub n_background: usize,
    #[arg(long, default_value = "survival")]
    pub output_type: OutputType,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Profile2dArgs {
    /// Exactly two variables.
    #[arg(long, num_args = 1, required = true)]
    pub variable: Vec<String>,
    /// Grid points per axis (default 10).
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub n_background: usize,
    #[arg(long, default_value = "survival")]
    pub output_type: OutputType,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ShapArgs {
    #[arg(long, default_value_t = 0)]
    pub row: usize,
    #[arg(long, default_value = "auto")]
    pub method: ShapMethod,
    #[arg(long, default_value_t = 100)]
    pub n_background: usize,
    /// Sampled orderings for the sampling estimator.
    #[arg(long, default_value_t = 100)]
    pub n_permutations: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LimeArgs {
    #[arg(long, default_value_t = 0)]
    pub row: usize,
    #[arg(long, default_value_t = 100)]
    pub n_neighbors: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IceArgs {
    #[arg(long, default_value_t = 0)]
    pub row: usize,
    #[arg(long)]
    pub variable: String,
    #[arg(long, default_value_t = 25)]
    pub grid_size: usize,
    #[arg(long, default_value = "survival")]
    pub output_type: OutputType,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SurvshapGlobalArgs {
    /// Instances explained, drawn from the dataset with the run seed.
    #[arg(long, default_value_t = 10)]
    pub n_instances: usize,
    #[arg(long, default_value = "auto")]
    pub method: ShapMethod,
    #[arg(long, default_value_t = 100)]
    pub n_background: usize,
    #[arg(long, default_value_t = 100)]
    pub n_permutations: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PlotArgs {
    /// Artifact JSON files; several files are drawn on one chart.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
}
