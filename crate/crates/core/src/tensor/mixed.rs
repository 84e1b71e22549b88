use super::sym::SymTensor;
use crate::error::{Error, Result};

/// Direct sum `f⁽⁰⁾ ⊕ … ⊕ f⁽ᵐ⁾` of symmetric tensors of consecutive ranks.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedTensor {
    parts: Vec<SymTensor>,
}

impl MixedTensor {
    pub fn new(parts: Vec<SymTensor>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::invalid("mixed tensor needs at least the rank-0 part"));
        };
        let n = first.dim();
        for (p, t) in parts.iter().enumerate() {
            if t.rank() != p {
                return Err(Error::RankMismatch { expected: p, got: t.rank() });
            }
            crate::error::check_dim(n, t.dim())?;
        }
        Ok(Self { parts })
    }

    pub fn zeros(n: usize, max_rank: usize) -> Self {
        Self { parts: (0..=max_rank).map(|p| SymTensor::zeros(n, p)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    pub fn max_rank(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn parts(&self) -> &[SymTensor] {
        &self.parts
    }

    pub fn part(&self, p: usize) -> &SymTensor {
        &self.parts[p]
    }

    pub fn part_mut(&mut self, p: usize) -> &mut SymTensor {
        &mut self.parts[p]
    }

    /// `Σ_p f⁽ᵖ⁾ · ξ^{⊗p}`, the integrand of the momentum ray transform.
    pub fn contract_direction(&self, xi: &[f64]) -> Result<num_complex::Complex64> {
        self.parts.iter().map(|t| t.contract_power(xi)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.parts.iter().map(SymTensor::norm_sqr).sum::<f64>().sqrt()
    }
}
