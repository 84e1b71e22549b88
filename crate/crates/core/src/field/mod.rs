//! Tensor fields sampled on uniform grids and their differential operators.

mod diff;
mod grid;
mod tensor_field;

pub use diff::{
    derivative_1d, fd_weights, mixed_partial,
    apply_coeff_op, boundary_jets, divergence, divergence_with, iterated, iterated_with, jets,
    laplacian, laplacian_with, partial, second_partial, sym_derivative, sym_derivative_with,
    Boundary, DiffOp, JetCheck,
};
pub(crate) use diff::contract_with_jets;
pub use grid::{GridDomain, MAX_POINTS};
pub use tensor_field::TensorField;
