use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use super::index::{num_components, position_of};
use super::plan::layout;
use crate::error::{check_dim, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Pointwise symmetric rank-`m` tensor in dimension `n`, stored by its
/// components at nondecreasing indices in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    n: usize,
    m: usize,
    data: Vec<Complex64>,
}

impl SymTensor {
    pub fn new(n: usize, m: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dim(num_components(n, m), data.len())?;
        if n == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Ok(Self { n, m, data })
    }

    pub fn from_real(n: usize, m: usize, data: &[f64]) -> Result<Self> {
        Self::new(n, m, data.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self { n, m, data: vec![ZERO; num_components(n, m)] }
    }

    pub fn scalar(n: usize, value: impl Into<Complex64>) -> Self {
        Self { n, m: 0, data: vec![value.into()] }
    }

    /// The unit tensor with a single nonzero compressed component.
    pub fn unit(n: usize, m: usize, pos: usize) -> Self {
        let mut t = Self::zeros(n, m);
        t.data[pos] = Complex64::new(1.0, 0.0);
        t
    }

    /// Kronecker delta as a rank-2 tensor.
    pub fn delta(n: usize) -> Self {
        let mut t = Self::zeros(n, 2);
        for k in 0..n as u8 {
            t.data[position_of(n, &[k, k])] = Complex64::new(1.0, 0.0);
        }
        t
    }

    pub fn vector<T: Copy + Into<Complex64>>(x: &[T]) -> Self {
        Self { n: x.len(), m: 1, data: x.iter().map(|&v| v.into()).collect() }
    }

    /// `x^{⊗m}` in compressed form.
    pub fn tensor_power<T: Copy + Into<Complex64>>(x: &[T], m: usize) -> Self {
        let n = x.len();
        let lay = layout(n, m);
        let data = lay
            .iter()
            .map(|(_, idx)| idx.iter().map(|&i| x[i as usize].into()).product())
            .collect();
        Self { n, m, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    pub fn components(&self) -> &[Complex64] {
        &self.data
    }

    pub fn components_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_components(self) -> Vec<Complex64> {
        self.data
    }

    /// Component at arbitrary-order 0-based labels.
    pub fn get(&self, labels: &[usize]) -> Complex64 {
        self.data[self.position(labels)]
    }

    pub fn set(&mut self, labels: &[usize], value: impl Into<Complex64>) {
        let p = self.position(labels);
        self.data[p] = value.into();
    }

    fn position(&self, labels: &[usize]) -> usize {
        assert_eq!(labels.len(), self.m, "label count must equal rank");
        let mut s: Vec<u8> = labels.iter().map(|&l| l as u8).collect();
        s.sort_unstable();
        position_of(self.n, &s)
    }

    pub fn multiplicity(&self, pos: usize) -> u64 {
        layout(self.n, self.m).multiplicity(pos)
    }

    /// Multiplicity-weighted pairing; equals the Frobenius pairing of the
    /// expanded tensors.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other)?;
        let lay = layout(self.n, self.m);
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .zip(lay.multiplicities())
            .map(|((a, b), &w)| a * b.conj() * w as f64)
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        let lay = layout(self.n, self.m);
        self.data
            .iter()
            .zip(lay.multiplicities())
            .map(|(a, &w)| a.norm_sqr() * w as f64)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest absolute compressed component.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Full contraction with `x^{⊗m}` (no conjugation).
    pub fn contract_power<T: Copy + Into<Complex64>>(&self, x: &[T]) -> Result<Complex64> {
        check_dim(self.n, x.len())?;
        let lay = layout(self.n, self.m);
        Ok(lay
            .iter()
            .map(|(p, idx)| {
                let mono: Complex64 = idx.iter().map(|&i| x[i as usize].into()).product();
                self.data[p] * mono * lay.multiplicity(p) as f64
            })
            .sum())
    }

    /// Expands to the full `n^m` array, row-major in the slot order.
    pub fn to_full(&self) -> Vec<Complex64> {
        let total = self.n.pow(self.m as u32);
        let mut out = Vec::with_capacity(total);
        let mut labels = vec![0u8; self.m];
        for flat in 0..total {
            let mut r = flat;
            for slot in (0..self.m).rev() {
                labels[slot] = (r % self.n) as u8;
                r /= self.n;
            }
            let mut s = labels.clone();
            s.sort_unstable();
            out.push(self.data[position_of(self.n, &s)]);
        }
        out
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        check_dim(self.n, other.n)?;
        if self.m != other.m {
            return Err(Error::RankMismatch { expected: self.m, got: other.m });
        }
        Ok(())
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        Self { n: self.n, m: self.m, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn conj(&self) -> Self {
        Self { n: self.n, m: self.m, data: self.data.iter().map(|v| v.conj()).collect() }
    }
}

/// Symmetrization of a full `n^m` array: the average over all slot
/// permutations.
pub fn symmetrize<T: Copy + Into<Complex64>>(raw: &[T], n: usize, m: usize) -> Result<SymTensor> {
    if n == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    check_dim(n.pow(m as u32), raw.len())?;
    let lay = layout(n, m);
    let mut acc = vec![ZERO; lay.len()];
    let mut labels = vec![0u8; m];
    for (flat, v) in raw.iter().enumerate() {
        let mut r = flat;
        for slot in (0..m).rev() {
            labels[slot] = (r % n) as u8;
            r /= n;
        }
        labels.sort_unstable();
        acc[position_of(n, &labels)] += (*v).into();
    }
    for (a, &w) in acc.iter_mut().zip(lay.multiplicities()) {
        *a /= w as f64;
    }
    Ok(SymTensor { n, m, data: acc })
}

impl Add for &SymTensor {
    type Output = SymTensor;
    fn add(self, rhs: &SymTensor) -> SymTensor {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &SymTensor {
    type Output = SymTensor;
    fn sub(self, rhs: &SymTensor) -> SymTensor {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&SymTensor> for SymTensor {
    fn add_assign(&mut self, rhs: &SymTensor) {
        assert!(self.n == rhs.n && self.m == rhs.m, "shape mismatch in tensor sum");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&SymTensor> for SymTensor {
    fn sub_assign(&mut self, rhs: &SymTensor) {
        assert!(self.n == rhs.n && self.m == rhs.m, "shape mismatch in tensor difference");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Neg for &SymTensor {
    type Output = SymTensor;
    fn neg(self) -> SymTensor {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &SymTensor {
    type Output = SymTensor;
    fn mul(self, s: f64) -> SymTensor {
        self.scale(s)
    }
}

impl Mul<Complex64> for &SymTensor {
    type Output = SymTensor;
    fn mul(self, s: Complex64) -> SymTensor {
        self.scale(s)
    }
}
