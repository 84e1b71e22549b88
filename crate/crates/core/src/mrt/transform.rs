use num_complex::Complex64;
use rayon::prelude::*;

use super::ray::{interpolation_stencil, trapezoid_nodes, Ray, RaySample};
use crate::error::{check_dim, Error, Result};
use crate::field::{GridDomain, TensorField};
use crate::tensor;

/// `mult(idx)·Π v[idx_j]` for every compressed index of rank `m`.
pub fn contraction_weights(v: &[Complex64], m: usize) -> Vec<Complex64> {
    let lay = tensor::layout(v.len(), m);
    lay.iter()
        .map(|(p, idx)| {
            let mono: Complex64 = idx.iter().map(|&i| v[i as usize]).product();
            mono * lay.multiplicity(p) as f64
        })
        .collect()
}

fn check_mixed(fields: &[TensorField]) -> Result<&GridDomain> {
    let first = fields.first().ok_or_else(|| Error::invalid("no fields given"))?;
    for (p, f) in fields.iter().enumerate() {
        if f.rank() != p {
            return Err(Error::RankMismatch { expected: p, got: f.rank() });
        }
        if f.domain() != first.domain() {
            return Err(Error::invalid("fields live on different grids"));
        }
    }
    Ok(first.domain())
}

/// `∫ t^k Σ_p ⟨f⁽ᵖ⁾(base + t·dir), c^{⊗p}⟩ dt` by trapezoid quadrature,
/// with a contraction vector `c` that may differ from `dir`.
pub fn line_moment(
    fields: &[TensorField],
    base: &[f64],
    dir: &[f64],
    k: usize,
    contraction: &[Complex64],
) -> Result<(Complex64, f64)> {
    let dom = check_mixed(fields)?;
    check_dim(dom.dim(), base.len())?;
    check_dim(dom.dim(), dir.len())?;
    check_dim(dom.dim(), contraction.len())?;
    if dir.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroDirection);
    }
    let weights: Vec<Vec<Complex64>> =
        (0..fields.len()).map(|p| contraction_weights(contraction, p)).collect();
    let (nodes, step) = trapezoid_nodes(dom, base, dir, 0.5 * dom.min_spacing());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut x = vec![0.0; dom.dim()];
    for (t, w) in nodes {
        for a in 0..x.len() {
            x[a] = base[a] + t * dir[a];
        }
        let stencil = interpolation_stencil(dom, &x);
        let mut integrand = Complex64::new(0.0, 0.0);
        for (f, cw) in fields.iter().zip(&weights) {
            for (c, wc) in cw.iter().enumerate() {
                let comp = f.component(c);
                let v: Complex64 = stencil.iter().map(|&(p, s)| comp[p] * s).sum();
                integrand += v * wc;
            }
        }
        acc += integrand * (w * t.powi(k as i32));
    }
    Ok((acc, step))
}

/// `∫ |t|^k Σ_p |⟨f⁽ᵖ⁾, ξ^{⊗p}⟩| dt`, the magnitude scale of a ray value.
pub fn ray_scale(fields: &[TensorField], ray: &Ray) -> Result<f64> {
    let dom = check_mixed(fields)?;
    check_dim(dom.dim(), ray.dir.len())?;
    let xi: Vec<Complex64> = ray.dir.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let weights: Vec<Vec<Complex64>> = (0..fields.len()).map(|p| contraction_weights(&xi, p)).collect();
    let (nodes, _) = trapezoid_nodes(dom, &ray.base, &ray.dir, 0.5 * dom.min_spacing());
    let mut acc = 0.0;
    for (t, w) in nodes {
        let stencil = interpolation_stencil(dom, &ray.point(t));
        let mut sum = 0.0;
        for (f, cw) in fields.iter().zip(&weights) {
            let mut part = Complex64::new(0.0, 0.0);
            for (c, wc) in cw.iter().enumerate() {
                let comp = f.component(c);
                part += stencil.iter().map(|&(p, s)| comp[p] * s).sum::<Complex64>() * wc;
            }
            sum += part.norm();
        }
        acc += sum * w * t.abs().powi(ray.k as i32);
    }
    Ok(acc)
}

/// Momentum ray transform `J^k F(x, ξ)` of `F = f⁽⁰⁾ ⊕ … ⊕ f⁽ᵐ⁾`, where
/// `fields[p]` has rank `p`. Rays that miss the box give zero.
pub fn forward_jk(fields: &[TensorField], ray: &Ray) -> Result<Complex64> {
    let xi: Vec<Complex64> = ray.dir.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    line_moment(fields, &ray.base, &ray.dir, ray.k, &xi).map(|(v, _)| v)
}

/// `I^k F`: the transform restricted to unit directions.
pub fn forward_ik(fields: &[TensorField], ray: &Ray) -> Result<Complex64> {
    if !ray.is_unit() {
        return Err(Error::invalid(format!("I^k needs a unit direction, |xi| = {}", ray.dir_norm())));
    }
    forward_jk(fields, ray)
}

/// Transforms of many rays in parallel.
pub fn sample_rays(fields: &[TensorField], rays: &[Ray]) -> Result<Vec<RaySample>> {
    rays.par_iter()
        .map(|ray| {
            let xi: Vec<Complex64> = ray.dir.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let (value, step) = line_moment(fields, &ray.base, &ray.dir, ray.k, &xi)?;
            Ok(RaySample { ray: ray.clone(), value, step })
        })
        .collect()
}

/// Orthonormal vectors completing `given` (assumed orthonormal) to a basis,
/// by Gram-Schmidt over the standard basis.
pub fn orthonormal_completion(n: usize, given: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = given.to_vec();
    let mut extra = Vec::new();
    for axis in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[axis] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= d * y;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            let v: Vec<f64> = v.iter().map(|x| x / norm).collect();
            basis.push(v.clone());
            extra.push(v);
        }
    }
    extra
}

/// Weighted moment `∫ y^α ⟨f(0, y, x''), (e_1 + iη)^{⊗m}⟩ dy` along the
/// `η`-axis in the hyperplane `x_1 = 0`. `offsets` are the coordinates
/// `x''` along the completion of `{e_1, η}` given by
/// [`orthonormal_completion`].
pub fn axis_moment_transform(
    f: &TensorField,
    eta: &[f64],
    offsets: &[f64],
    alpha: usize,
) -> Result<Complex64> {
    let n = f.dim();
    check_dim(n, eta.len())?;
    if n < 2 {
        return Err(Error::Unsupported("the moment transform needs n >= 2".into()));
    }
    check_dim(n - 2, offsets.len())?;
    if alpha > f.rank() {
        return Err(Error::invalid(format!("weight power {alpha} exceeds rank {}", f.rank())));
    }
    if eta[0].abs() > 1e-10 {
        return Err(Error::invalid("eta must be orthogonal to e_1"));
    }
    let norm = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::invalid("eta must be a unit vector"));
    }
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let rest = orthonormal_completion(n, &[e1, eta.to_vec()]);
    let mut base = vec![0.0; n];
    for (s, v) in offsets.iter().zip(&rest) {
        for (b, x) in base.iter_mut().zip(v) {
            *b += s * x;
        }
    }
    let zeta: Vec<Complex64> =
        (0..n).map(|a| Complex64::new(if a == 0 { 1.0 } else { 0.0 }, eta[a])).collect();
    // lower-rank slots stay zero so only rank m contributes
    let mut fields: Vec<TensorField> = (0..f.rank()).map(|p| TensorField::zeros(f.domain(), p)).collect();
    fields.push(f.clone());
    line_moment(&fields, &base, eta, alpha, &zeta).map(|(v, _)| v)
}
