use num_complex::Complex64;

use crate::error::Result;
use crate::field::{fd_weights, TensorField};
use crate::mrt::{forward_jk, Ray};

/// `⟨ξ, ∂_x⟩^p J^k F(x, ξ)` by a central difference over base points
/// shifted along the ray with the given step.
///
/// The quadrature nodes depend only on where the line crosses the box, so
/// `s ↦ J^k F(x + sξ, ξ)` is a polynomial of degree `k` in `s` and the
/// stencil is exact up to rounding.
pub fn directional_derivative(fields: &[TensorField], ray: &Ray, p: usize, step: f64) -> Result<Complex64> {
    if p == 0 {
        return forward_jk(fields, ray);
    }
    let half = p.div_ceil(2) as isize;
    let offsets: Vec<f64> = (-half..=half).map(|i| i as f64).collect();
    let w = fd_weights(&offsets, p);
    let mut acc = Complex64::new(0.0, 0.0);
    for (o, wi) in offsets.iter().zip(&w) {
        if *wi != 0.0 {
            acc += forward_jk(fields, &ray.shifted(o * step))? * *wi;
        }
    }
    Ok(acc / step.powi(p as i32))
}

/// The value the translation identity predicts for `⟨ξ,∂_x⟩^p J^k F`:
/// `(−1)^p C(k,p) p! J^{k−p} F`, or zero when `p > k`.
pub fn translation_prediction(fields: &[TensorField], ray: &Ray, p: usize) -> Result<Complex64> {
    let k = ray.k;
    if p > k {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let falling: f64 = ((k - p + 1)..=k).map(|v| v as f64).product();
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    Ok(forward_jk(fields, &ray.with_order(k - p))? * (sign * falling))
}
