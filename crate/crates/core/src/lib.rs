//! Model-agnostic explanations for survival models.
//!
//! Wrap any model that produces a survival function in an [`Explainer`], then compute
//! time-dependent performance metrics, permutation importance, PDP/ALE profiles,
//! residual diagnostics, SurvSHAP(t) attributions, SurvLIME surrogates and ICE curves.
//!
//! ```
//! use survival_explain::{fit_cox, Explainer, FitOptions, SurvivalDataset};
//!
//! let data = SurvivalDataset::from_rows(
//!     vec![2.0, 3.0, 5.0, 7.0, 11.0],
//!     vec![true, true, false, true, true],
//!     &[vec![1.0], vec![0.5], vec![0.7], vec![-0.2], vec![-1.0]],
//! )?;
//! let cox = fit_cox(&data, FitOptions::default())?;
//! let explainer = Explainer::new(cox, data.clone(), None)?;
//! let c = survival_explain::metrics::concordance_index(&explainer, &data)?;
//! assert!(c > 0.5);
//! # Ok::<(), survival_explain::Error>(())
//! ```

pub mod curve;
pub mod data;
pub mod error;
pub mod estimators;
pub mod explainer;
pub mod global;
pub mod local;
pub mod metrics;
pub mod models;
mod optim;
pub mod stats;

pub use curve::{chf_from_survival, CurveKind, StepCurve, SURVIVAL_FLOOR};
pub use data::{Matrix, SurvivalDataset, TimeGrid};
pub use error::{Error, Result};
pub use estimators::{censoring_km, kaplan_meier, nelson_aalen};
pub use explainer::{default_grid, Explainer, OutputType, Prediction};
pub use models::{
    fit_cox, fit_weibull_aft, predict_survival, CoxModel, CoxPartialLikelihood, FnModel,
    KaplanMeierModel, ReferenceModel, SurvivalModel, WeibullAftModel, WeibullLikelihood,
};
pub use optim::{FitOptions, DIVERGENCE_BOUND, MAX_HALVINGS};
