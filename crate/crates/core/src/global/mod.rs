//! Dataset-level explanations: permutation importance, PDP/ALE profiles and residuals.

mod diagnostics;
mod importance;
mod profile;

pub use diagnostics::{model_diagnostics, ResidualSet};
pub use importance::{model_parts, model_parts_on, VariableImportance};
pub use profile::{
    model_profile, model_profile_2d, partial_dependence, ProfileMethod, ProfileOptions,
    ProfileSurface,
};
