//! Prediction-level explanations: SurvSHAP(t), SurvLIME and ICE profiles.

mod ice;
mod survlime;
mod survshap;

pub use ice::{ice_curves, predict_profile, IceProfile};
pub use survlime::{predict_parts_survlime, LimeOptions, SurvLimeResult};
pub use survshap::{
    model_survshap, predict_parts_survshap, BeeswarmPoint, GlobalSurvShap, ShapMethod, ShapOptions,
    SurvShapResult, EXACT_MAX_FEATURES,
};
