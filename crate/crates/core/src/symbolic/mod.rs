//! Exact polynomial differential operators, conjugation by exponentials,
//! the transport operator and complex geometrical optics amplitudes.

mod cgo;
mod diffop;
mod poly;
mod polyharmonic;

pub use cgo::{
    cgo_jets, cgo_pair, conjugated_polyharmonic, dbar_apply, holomorphic, particular_amplitude,
    polyanalytic_term, transport_apply, z_coordinate, CgoParams,
};
pub use diffop::{
    eval_components, gauge_top_coefficient, poly_gradient, poly_i_delta, PolyDiffOp, MAX_OPERATOR_ORDER,
};
pub use poly::{
    from_complex64, from_f64, imaginary_unit, integer, rational, to_complex64, CompiledPoly, Polynomial, Scalar,
};
pub use polyharmonic::{polyharmonic_basis, MAX_BASIS_DEGREE};
