use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::field::GridDomain;

/// Base point, direction and momentum order of one line integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub base: Vec<f64>,
    pub dir: Vec<f64>,
    pub k: usize,
}

impl Ray {
    pub fn new(base: Vec<f64>, dir: Vec<f64>, k: usize) -> Result<Self> {
        check_dim(base.len(), dir.len())?;
        if dir.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroDirection);
        }
        if base.iter().chain(&dir).any(|v| !v.is_finite()) {
            return Err(Error::invalid("ray coordinates must be finite"));
        }
        Ok(Self { base, dir, k })
    }

    pub fn dir_norm(&self) -> f64 {
        self.dir.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_unit(&self) -> bool {
        (self.dir_norm() - 1.0).abs() <= 1e-12
    }

    pub fn point(&self, t: f64) -> Vec<f64> {
        self.base.iter().zip(&self.dir).map(|(b, d)| b + t * d).collect()
    }

    /// Same ray with the base moved by `s` along the direction.
    pub fn shifted(&self, s: f64) -> Self {
        Self { base: self.point(s), dir: self.dir.clone(), k: self.k }
    }

    pub fn with_order(&self, k: usize) -> Self {
        Self { k, ..self.clone() }
    }
}

/// A ray together with its transform value.
#[derive(Clone, Debug, PartialEq)]
pub struct RaySample {
    pub ray: Ray,
    pub value: num_complex::Complex64,
    /// Quadrature step in arc length.
    pub step: f64,
}

/// Parameter interval where the line meets the grid box (slab method).
pub fn clip_to_box(domain: &GridDomain, base: &[f64], dir: &[f64]) -> Option<(f64, f64)> {
    let lo = domain.origin();
    let hi = domain.upper();
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for a in 0..domain.dim() {
        if dir[a] == 0.0 {
            if base[a] < lo[a] || base[a] > hi[a] {
                return None;
            }
            continue;
        }
        let (mut ta, mut tb) = ((lo[a] - base[a]) / dir[a], (hi[a] - base[a]) / dir[a]);
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
    }
    (t1 > t0).then_some((t0, t1))
}

/// Composite trapezoid nodes `(t, weight)` along the clipped segment with
/// arc-length step at most `max_step`.
pub fn trapezoid_nodes(
    domain: &GridDomain,
    base: &[f64],
    dir: &[f64],
    max_step: f64,
) -> (Vec<(f64, f64)>, f64) {
    let Some((t0, t1)) = clip_to_box(domain, base, dir) else {
        return (Vec::new(), max_step);
    };
    let speed = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let length = (t1 - t0) * speed;
    let intervals = (length / max_step).ceil().max(1.0) as usize;
    let dt = (t1 - t0) / intervals as f64;
    let nodes = (0..=intervals)
        .map(|i| {
            let w = if i == 0 || i == intervals { 0.5 * dt } else { dt };
            (t0 + i as f64 * dt, w)
        })
        .collect();
    (nodes, dt * speed)
}

/// Multilinear interpolation weights `(point, weight)` at `x`; empty when
/// `x` lies outside the box.
pub fn interpolation_stencil(domain: &GridDomain, x: &[f64]) -> Vec<(usize, f64)> {
    let n = domain.dim();
    let mut cell = vec![0usize; n];
    let mut frac = vec![0.0; n];
    for a in 0..n {
        let len = domain.shape()[a];
        let s = (x[a] - domain.origin()[a]) / domain.spacing()[a];
        let tol = 1e-9;
        if s < -tol || s > (len - 1) as f64 + tol {
            return Vec::new();
        }
        let s = s.clamp(0.0, (len - 1) as f64);
        let i = (s.floor() as usize).min(len - 2);
        cell[a] = i;
        frac[a] = s - i as f64;
    }
    let mut out = Vec::with_capacity(1 << n);
    for corner in 0..(1usize << n) {
        let mut w = 1.0;
        let mut flat = 0;
        for a in 0..n {
            let bit = corner >> a & 1;
            w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            flat = flat * domain.shape()[a] + cell[a] + bit;
        }
        if w != 0.0 {
            out.push((flat, w));
        }
    }
    out
}
