//! Exact pointwise algebra of symmetric tensors.

mod index;
mod mixed;
mod ops;
pub(crate) mod plan;
mod sym;

pub use index::{binomial, factorial, num_components, Layout, SymIndex};
pub use mixed::MixedTensor;
pub use ops::{
    delta_matrices, i_delta, i_delta_pow, i_vec, j_delta, j_vec, jdelta_idelta_solve,
    projection_matrix, projection_p, trace_free_basis, trace_free_decompose,
    trace_free_reassemble,
};
pub(crate) use ops::real_matvec;
pub use plan::{AxisMap, Entry, LinearMap};
pub use sym::{symmetrize, SymTensor};

/// Cached layout for `(n, m)`.
pub fn layout(n: usize, m: usize) -> std::sync::Arc<Layout> {
    plan::layout(n, m)
}

/// Sparse `i_δ : S^m → S^{m+2}` with exact rational weights.
pub fn i_delta_map(n: usize, m: usize) -> std::sync::Arc<LinearMap> {
    plan::i_delta(n, m)
}
