//! Separation of mixed-order transforms and kernel analysis of `I^m`.

mod kernel;
mod separation;
mod translation;

pub use kernel::{
    constant_field, kernel_field, kernel_probe, random_smooth_field, random_smooth_scalar,
    random_unit_field, residual_ratio, KernelReport, MAX_PROBE_UNKNOWNS,
};
pub use separation::{
    bareiss_determinant, column_differencing_determinant, determinant_check, exact_determinant,
    separate_components, separate_shifted, unit_separation_matrix, DeterminantCheck,
    SeparationMatrix,
};
pub use translation::{directional_derivative, translation_prediction};
