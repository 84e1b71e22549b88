use num_complex::Complex64;

use super::grid::GridDomain;
use crate::error::{check_dim, Error, Result};
use crate::tensor::{self, real_matvec, LinearMap, SymTensor};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Symmetric-tensor-valued samples on a grid, stored component-major:
/// `values[comp * points + point]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    domain: GridDomain,
    rank: usize,
    values: Vec<Complex64>,
}

impl TensorField {
    pub fn zeros(domain: &GridDomain, rank: usize) -> Self {
        let len = tensor::num_components(domain.dim(), rank) * domain.len();
        Self { domain: domain.clone(), rank, values: vec![ZERO; len] }
    }

    pub fn from_values(domain: &GridDomain, rank: usize, values: Vec<Complex64>) -> Result<Self> {
        check_dim(tensor::num_components(domain.dim(), rank) * domain.len(), values.len())?;
        Ok(Self { domain: domain.clone(), rank, values })
    }

    /// Samples a tensor-valued function at every grid point.
    pub fn from_fn(
        domain: &GridDomain,
        rank: usize,
        mut f: impl FnMut(&[f64]) -> SymTensor,
    ) -> Result<Self> {
        let mut out = Self::zeros(domain, rank);
        for p in 0..domain.len() {
            let t = f(&domain.coord(p));
            if t.rank() != rank {
                return Err(Error::RankMismatch { expected: rank, got: t.rank() });
            }
            check_dim(domain.dim(), t.dim())?;
            out.set_at(p, &t);
        }
        Ok(out)
    }

    pub fn scalar_from_fn(domain: &GridDomain, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let values = (0..domain.len()).map(|p| f(&domain.coord(p))).collect();
        Self { domain: domain.clone(), rank: 0, values }
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn num_components(&self) -> usize {
        tensor::num_components(self.dim(), self.rank)
    }

    pub fn points(&self) -> usize {
        self.domain.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let np = self.points();
        &self.values[c * np..(c + 1) * np]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let np = self.points();
        &mut self.values[c * np..(c + 1) * np]
    }

    pub fn at(&self, point: usize) -> SymTensor {
        let np = self.points();
        let data = (0..self.num_components()).map(|c| self.values[c * np + point]).collect();
        SymTensor::new(self.dim(), self.rank, data).expect("component count matches layout")
    }

    pub fn set_at(&mut self, point: usize, t: &SymTensor) {
        let np = self.points();
        for (c, v) in t.components().iter().enumerate() {
            self.values[c * np + point] = *v;
        }
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::invalid("fields live on different grids"));
        }
        if self.rank != other.rank {
            return Err(Error::RankMismatch { expected: self.rank, got: other.rank });
        }
        Ok(())
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: impl Into<Complex64>, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let s = s.into();
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + s * b).collect();
        Ok(Self { domain: self.domain.clone(), rank: self.rank, values })
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        Self {
            domain: self.domain.clone(),
            rank: self.rank,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// Applies a sparse pointwise map (e.g. `i_δ`, `j_δ`) at every point.
    pub fn map_pointwise(&self, map: &LinearMap, out_rank: usize) -> Self {
        let np = self.points();
        let mut out = Self::zeros(&self.domain, out_rank);
        for e in &map.entries {
            let w = *e.coef.numer() as f64 / *e.coef.denom() as f64;
            let (src, dst) = (e.inp * np, e.out * np);
            for p in 0..np {
                let v = self.values[src + p] * w;
                out.values[dst + p] += v;
            }
        }
        out
    }

    pub fn i_delta(&self) -> Self {
        self.map_pointwise(&tensor::plan::i_delta(self.dim(), self.rank), self.rank + 2)
    }

    pub fn j_delta(&self) -> Self {
        self.map_pointwise(
            &tensor::plan::j_delta(self.dim(), self.rank),
            self.rank.saturating_sub(2),
        )
    }

    pub fn projection_p(&self) -> Self {
        if self.rank < 2 {
            return self.clone();
        }
        let pm = tensor::plan::projection(self.dim(), self.rank);
        self.map_dense(&pm, self.rank)
    }

    pub fn jdelta_idelta_solve(&self) -> Result<Self> {
        let inv = tensor::plan::jdelta_idelta_inverse(self.dim(), self.rank);
        let inv = inv
            .as_ref()
            .as_ref()
            .ok_or_else(|| Error::Singular("j_delta i_delta".into()))?;
        Ok(self.map_dense(inv, self.rank))
    }

    fn map_dense(&self, a: &nalgebra::DMatrix<f64>, out_rank: usize) -> Self {
        let mut out = Self::zeros(&self.domain, out_rank);
        for p in 0..self.points() {
            let v = real_matvec(a, self.at(p).components());
            let np = self.points();
            for (c, x) in v.into_iter().enumerate() {
                out.values[c * np + p] = x;
            }
        }
        out
    }

    /// Trapezoid-rule `∫ ⟨f, g⟩ dx` with the multiplicity-weighted pairing.
    pub fn inner_integral(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        let w = self.domain.trapezoid_weights();
        Ok(self.weighted_pairing(other, &w))
    }

    /// Pairing with unit point weights (the discrete ℓ² product).
    pub fn inner_uniform(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        let w = vec![1.0; self.points()];
        Ok(self.weighted_pairing(other, &w))
    }

    fn weighted_pairing(&self, other: &Self, w: &[f64]) -> Complex64 {
        let np = self.points();
        let lay = tensor::layout(self.dim(), self.rank);
        let mut acc = ZERO;
        for (c, &mult) in lay.multiplicities().iter().enumerate() {
            let a = &self.values[c * np..(c + 1) * np];
            let b = &other.values[c * np..(c + 1) * np];
            let s: Complex64 = a.iter().zip(b).zip(w).map(|((x, y), w)| x * y.conj() * *w).sum();
            acc += s * mult as f64;
        }
        acc
    }

    /// Trapezoid L² norm.
    pub fn norm_l2(&self) -> f64 {
        self.inner_integral(self).map(|v| v.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    /// Unweighted ℓ² norm over grid points (multiplicity-weighted components).
    pub fn norm_uniform(&self) -> f64 {
        self.inner_uniform(self).map(|v| v.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Zeroes every point closer than `margin` points to a face.
    pub fn zero_margin(&mut self, margin: usize) {
        let np = self.points();
        let outer: Vec<usize> = (0..np).filter(|&p| self.domain.depth(p) < margin).collect();
        for c in 0..self.num_components() {
            for &p in &outer {
                self.values[c * np + p] = ZERO;
            }
        }
    }

    /// Largest value within `margin` points of a face.
    pub fn max_abs_near_faces(&self, margin: usize) -> f64 {
        let np = self.points();
        (0..np)
            .filter(|&p| self.domain.depth(p) < margin)
            .flat_map(|p| (0..self.num_components()).map(move |c| c * np + p))
            .map(|i| self.values[i].norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Add for &TensorField {
    type Output = TensorField;
    fn add(self, rhs: &TensorField) -> TensorField {
        self.axpy(1.0, rhs).expect("compatible fields")
    }
}

impl std::ops::Sub for &TensorField {
    type Output = TensorField;
    fn sub(self, rhs: &TensorField) -> TensorField {
        self.axpy(-1.0, rhs).expect("compatible fields")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointwise_algebra_matches_tensor_ops() {
        let g = GridDomain::cube(2, 5, -1.0, 1.0).unwrap();
        let f = TensorField::from_fn(&g, 2, |x| {
            SymTensor::from_real(2, 2, &[x[0], x[0] * x[1] + 1.0, x[1] * x[1]]).unwrap()
        })
        .unwrap();
        let id = f.i_delta();
        let jd = f.j_delta();
        let pf = f.projection_p();
        for p in [0, 7, 12, 24] {
            let t = f.at(p);
            assert!((&id.at(p) - &tensor::i_delta(&t)).max_abs() < 1e-15);
            assert!((&jd.at(p) - &tensor::j_delta(&t)).max_abs() < 1e-15);
            assert!((&pf.at(p) - &tensor::projection_p(&t)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn margin_zeroing() {
        let g = GridDomain::cube(2, 6, 0.0, 1.0).unwrap();
        let mut f = TensorField::scalar_from_fn(&g, |_| Complex64::new(1.0, 0.0));
        f.zero_margin(2);
        assert_eq!(f.max_abs_near_faces(2), 0.0);
        let live = f.values().iter().filter(|v| v.re == 1.0).count();
        assert_eq!(live, 4);
    }
}
