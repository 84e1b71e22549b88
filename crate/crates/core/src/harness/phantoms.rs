use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::{GridDomain, TensorField};
use crate::tensor::{projection_p, trace_free_basis, SymTensor};

/// `(1 − |x−c|²/R²)^4` inside the ball, zero outside.
pub fn ball_profile(x: &[f64], center: &[f64], radius: f64) -> f64 {
    let s: f64 = x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>() / (radius * radius);
    if s < 1.0 {
        (1.0 - s).powi(4)
    } else {
        0.0
    }
}

/// Smooth ball bump times a constant tensor.
pub fn ball_bump(domain: &GridDomain, tensor: &SymTensor, center: &[f64], radius: f64) -> Result<TensorField> {
    crate::error::check_dim(domain.dim(), tensor.dim())?;
    crate::error::check_dim(domain.dim(), center.len())?;
    TensorField::from_fn(domain, tensor.rank(), |x| tensor.scale(ball_profile(x, center, radius)))
}

/// A unit trace-free tensor with seeded random coefficients in the
/// trace-free basis.
pub fn random_trace_free_tensor(n: usize, m: usize, rng: &mut ChaCha8Rng) -> SymTensor {
    let basis = trace_free_basis(n, m);
    let len = crate::tensor::num_components(n, m);
    let mut data = vec![Complex64::new(0.0, 0.0); len];
    for b in &basis {
        let w: f64 = rng.gen_range(-1.0..1.0);
        for (d, v) in data.iter_mut().zip(b.iter()) {
            *d += w * v;
        }
    }
    let t = projection_p(&SymTensor::new(n, m, data).expect("sized from layout"));
    let norm = t.norm();
    if norm > 0.0 {
        t.scale(1.0 / norm)
    } else {
        t
    }
}

/// Ball bump carrying a random unit trace-free tensor.
pub fn trace_free_bump(domain: &GridDomain, m: usize, rng: &mut ChaCha8Rng) -> Result<TensorField> {
    let n = domain.dim();
    let t = random_trace_free_tensor(n, m, rng);
    let center: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.15..0.15)).collect();
    ball_bump(domain, &t, &center, 0.55)
}
