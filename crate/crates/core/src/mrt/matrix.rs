use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::ray::{interpolation_stencil, trapezoid_nodes, Ray};
use super::transform::contraction_weights;
use crate::error::{Error, Result};
use crate::field::{GridDomain, TensorField};
use crate::tensor;

/// Largest dense transform matrix accepted, in entries.
pub const MAX_MATRIX_ENTRIES: usize = 10_000_000;

/// Column ordering for a mixed field of ranks `0..=m` over the interior
/// grid points (one-point margin excluded): rank, then component, then point.
#[derive(Clone, Debug)]
pub struct ColumnLayout {
    domain: GridDomain,
    max_rank: usize,
    interior: Vec<usize>,
    /// column of `(point)` within a block, `usize::MAX` outside
    slot: Vec<usize>,
    offsets: Vec<usize>,
}

impl ColumnLayout {
    pub fn new(domain: &GridDomain, max_rank: usize) -> Self {
        let interior: Vec<usize> = (0..domain.len()).filter(|&p| domain.depth(p) >= 1).collect();
        let mut slot = vec![usize::MAX; domain.len()];
        for (i, &p) in interior.iter().enumerate() {
            slot[p] = i;
        }
        let mut offsets = vec![0];
        for p in 0..=max_rank {
            let prev = *offsets.last().unwrap();
            offsets.push(prev + tensor::num_components(domain.dim(), p) * interior.len());
        }
        Self { domain: domain.clone(), max_rank, interior, slot, offsets }
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn interior_points(&self) -> &[usize] {
        &self.interior
    }

    pub fn column(&self, rank: usize, comp: usize, point: usize) -> Option<usize> {
        let s = self.slot[point];
        (s != usize::MAX).then(|| self.offsets[rank] + comp * self.interior.len() + s)
    }

    pub fn pack(&self, fields: &[TensorField]) -> Result<Vec<Complex64>> {
        if fields.len() != self.max_rank + 1 {
            return Err(Error::RankMismatch { expected: self.max_rank, got: fields.len().saturating_sub(1) });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        for (p, f) in fields.iter().enumerate() {
            if f.rank() != p {
                return Err(Error::RankMismatch { expected: p, got: f.rank() });
            }
            for c in 0..f.num_components() {
                let comp = f.component(c);
                for &pt in &self.interior {
                    out[self.column(p, c, pt).unwrap()] = comp[pt];
                }
            }
        }
        Ok(out)
    }

    pub fn unpack(&self, x: &[Complex64]) -> Result<Vec<TensorField>> {
        crate::error::check_dim(self.len(), x.len())?;
        let mut fields = Vec::with_capacity(self.max_rank + 1);
        for p in 0..=self.max_rank {
            let mut f = TensorField::zeros(&self.domain, p);
            for c in 0..f.num_components() {
                for &pt in &self.interior {
                    f.component_mut(c)[pt] = x[self.column(p, c, pt).unwrap()];
                }
            }
            fields.push(f);
        }
        Ok(fields)
    }
}

/// Dense matrix of `F ↦ (I^m F)(ray)` for fields vanishing on the outer
/// ring of grid points. Rows follow `rays`, columns follow [`ColumnLayout`].
pub fn build_im_matrix(domain: &GridDomain, m: usize, rays: &[Ray]) -> Result<DMatrix<f64>> {
    let layout = ColumnLayout::new(domain, m);
    let entries = rays.len().saturating_mul(layout.len());
    if entries > MAX_MATRIX_ENTRIES {
        return Err(Error::SizeGuard(format!(
            "{} rays x {} unknowns exceeds {MAX_MATRIX_ENTRIES} entries",
            rays.len(),
            layout.len()
        )));
    }
    for ray in rays {
        crate::error::check_dim(domain.dim(), ray.dir.len())?;
        if ray.k != m {
            return Err(Error::invalid(format!("ray has momentum order {}, expected {m}", ray.k)));
        }
        if !ray.is_unit() {
            return Err(Error::invalid("I^m rows need unit directions"));
        }
    }
    let rows: Vec<Vec<(usize, f64)>> = rays.par_iter().map(|ray| row_entries(domain, &layout, m, ray)).collect();
    let mut a = DMatrix::zeros(rays.len(), layout.len());
    for (r, row) in rows.into_iter().enumerate() {
        for (c, v) in row {
            a[(r, c)] += v;
        }
    }
    Ok(a)
}

fn row_entries(domain: &GridDomain, layout: &ColumnLayout, m: usize, ray: &Ray) -> Vec<(usize, f64)> {
    let xi: Vec<Complex64> = ray.dir.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let weights: Vec<Vec<f64>> = (0..=m).map(|p| contraction_weights(&xi, p).iter().map(|c| c.re).collect()).collect();
    let (nodes, _) = trapezoid_nodes(domain, &ray.base, &ray.dir, 0.5 * domain.min_spacing());
    let mut out = Vec::new();
    for (t, w) in nodes {
        let x = ray.point(t);
        let q = w * t.powi(ray.k as i32);
        for (pt, s) in interpolation_stencil(domain, &x) {
            for (p, cw) in weights.iter().enumerate() {
                for (c, wc) in cw.iter().enumerate() {
                    if let Some(col) = layout.column(p, c, pt) {
                        out.push((col, q * s * wc));
                    }
                }
            }
        }
    }
    out
}
