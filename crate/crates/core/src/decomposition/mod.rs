//! Trace-free Helmholtz decomposition and its principal symbol.

mod cg;
mod helmholtz;
mod symbol;

pub use cg::{conjugate_gradient, CgOutcome};
pub use helmholtz::{
    helmholtz_trace_free, padded_derivative, padded_divergence, solver_operator, unknown_points,
    DecompositionResult, DEFAULT_TOLERANCE,
};
pub use symbol::{symbol_identity_sides, symbol_image, symbol_matrix, symbol_operator};
