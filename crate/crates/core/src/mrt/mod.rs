//! Momentum ray transforms by line quadrature.

mod matrix;
mod ray;
pub mod rayset;
mod transform;

pub use matrix::{build_im_matrix, ColumnLayout, MAX_MATRIX_ENTRIES};
pub use ray::{clip_to_box, interpolation_stencil, trapezoid_nodes, Ray, RaySample};
pub use transform::{
    axis_moment_transform, contraction_weights, forward_ik, forward_jk, line_moment,
    orthonormal_completion, ray_scale, sample_rays,
};
