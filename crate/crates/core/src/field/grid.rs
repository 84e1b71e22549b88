use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of grid points accepted by [`GridDomain::new`].
pub const MAX_POINTS: usize = 10_000_000;

/// Uniform tensor-product grid over a box. `shape` counts points per axis,
/// so a grid with `N` points on `[lo, hi]` has spacing `(hi − lo)/(N − 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    shape: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
}

impl GridDomain {
    pub fn new(shape: Vec<usize>, spacing: Vec<f64>, origin: Vec<f64>) -> Result<Self> {
        let n = shape.len();
        if n == 0 {
            return Err(Error::invalid("grid needs at least one axis"));
        }
        crate::error::check_dim(n, spacing.len())?;
        crate::error::check_dim(n, origin.len())?;
        if shape.iter().any(|&s| s < 2) {
            return Err(Error::GridTooSmall("every axis needs at least 2 points".into()));
        }
        if spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::invalid("grid spacing must be positive and finite"));
        }
        let total = shape.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s));
        match total {
            Some(t) if t < MAX_POINTS => Ok(Self { shape, spacing, origin }),
            _ => Err(Error::SizeGuard(format!("grid {shape:?} has too many points"))),
        }
    }

    /// `points` per axis spanning `[lo, hi]^n`.
    pub fn cube(n: usize, points: usize, lo: f64, hi: f64) -> Result<Self> {
        if points < 2 {
            return Err(Error::GridTooSmall("every axis needs at least 2 points".into()));
        }
        let h = (hi - lo) / (points - 1) as f64;
        Self::new(vec![points; n], vec![h; n], vec![lo; n])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(0.0, f64::max)
    }

    /// Row-major stride of an axis (last axis fastest).
    pub fn stride(&self, axis: usize) -> usize {
        self.shape[axis + 1..].iter().product()
    }

    /// Coordinates along each axis.
    pub fn axes(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|a| (0..self.shape[a]).map(|i| self.origin[a] + self.spacing[a] * i as f64).collect())
            .collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|a| self.origin[a] + self.spacing[a] * (self.shape[a] - 1) as f64)
            .collect()
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        let mut r = flat;
        for a in (0..self.dim()).rev() {
            idx[a] = r % self.shape[a];
            r /= self.shape[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn coord(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.origin[a] + self.spacing[a] * i as f64)
            .collect()
    }

    /// Distance in points from the nearest face.
    pub fn depth(&self, flat: usize) -> usize {
        self.multi_index(flat)
            .iter()
            .zip(&self.shape)
            .map(|(&i, &s)| i.min(s - 1 - i))
            .min()
            .unwrap_or(0)
    }

    /// Product trapezoid weight of a point.
    pub fn trapezoid_weight(&self, flat: usize) -> f64 {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| {
                let end = i == 0 || i + 1 == self.shape[a];
                self.spacing[a] * if end { 0.5 } else { 1.0 }
            })
            .product()
    }

    pub fn trapezoid_weights(&self) -> Vec<f64> {
        (0..self.len()).map(|p| self.trapezoid_weight(p)).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }
}
