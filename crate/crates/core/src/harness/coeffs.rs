use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{contract_with_jets, jets, GridDomain, TensorField};
use crate::symbolic::{PolyDiffOp, Polynomial};
use crate::tensor::layout;

/// Lower-order coefficients `a^0..a^{2m−1}` of `Q(x,D) = Σ a^l D^l`,
/// with `D = −i∂`.
#[derive(Clone, Debug)]
pub struct CoefficientSet {
    m: usize,
    fields: Vec<TensorField>,
}

impl CoefficientSet {
    pub fn new(m: usize, fields: Vec<TensorField>) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("operator half-order must be at least 1"));
        }
        if fields.len() != 2 * m {
            return Err(Error::invalid(format!("expected {} coefficient fields, got {}", 2 * m, fields.len())));
        }
        let dom = fields[0].domain().clone();
        for (l, f) in fields.iter().enumerate() {
            if f.rank() != l {
                return Err(Error::RankMismatch { expected: l, got: f.rank() });
            }
            if f.domain() != &dom {
                return Err(Error::invalid("coefficient fields live on different grids"));
            }
        }
        Ok(Self { m, fields })
    }

    pub fn zeros(m: usize, domain: &GridDomain) -> Result<Self> {
        Self::new(m, (0..2 * m).map(|l| TensorField::zeros(domain, l)).collect())
    }

    /// Samples the orders `0..2m` of an operator given in `∂` form,
    /// converting each coefficient to the `D` convention (`a_D = i^l a_∂`).
    pub fn from_operator(op: &PolyDiffOp, m: usize, domain: &GridDomain) -> Result<Self> {
        let n = domain.dim();
        if op.dim() != n {
            return Err(Error::DimMismatch { expected: n, got: op.dim() });
        }
        let fields = (0..2 * m)
            .map(|l| {
                let phase = Complex64::new(0.0, 1.0).powu(l as u32);
                let polys: Vec<_> = op.coefficient_polys(l).iter().map(Polynomial::compile).collect();
                let axes = domain.axes();
                let values = polys.iter().flat_map(|p| p.eval_tensor_grid(&axes)).map(|v| v * phase).collect();
                TensorField::from_values(domain, l, values).expect("one block per component")
            })
            .collect();
        Self::new(m, fields)
    }

    pub fn half_order(&self) -> usize {
        self.m
    }

    pub fn domain(&self) -> &GridDomain {
        self.fields[0].domain()
    }

    pub fn fields(&self) -> &[TensorField] {
        &self.fields
    }

    pub fn field(&self, l: usize) -> &TensorField {
        &self.fields[l]
    }

    /// The order `2m−1` coefficient.
    pub fn top(&self) -> &TensorField {
        &self.fields[2 * self.m - 1]
    }

    pub fn max_abs(&self) -> f64 {
        self.fields.iter().map(TensorField::max_abs).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m, fields: self.fields.iter().map(|f| f.scale(s)).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.m != self.m {
            return Err(Error::invalid("coefficient sets of different order"));
        }
        let fields = self.fields.iter().zip(&other.fields).map(|(a, b)| a.axpy(1.0, b)).collect::<Result<_>>()?;
        Self::new(self.m, fields)
    }
}

/// Value of `∫ Σ_l ⟨a^l, D^{⊗l}u⟩ v dx` with its quadrature budget.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub value: Complex64,
    /// `∫ Σ_l Σ mult·|a^l||∂^l u||v|`, the size the value is compared to.
    pub scale: f64,
    /// Quadrature tolerance relative to `scale` (`h²`).
    pub tolerance: f64,
    pub descriptor: String,
}

impl IdentityReport {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.norm() / self.scale
        } else {
            self.value.norm()
        }
    }

    pub fn within_tolerance(&self) -> bool {
        self.value.norm() <= self.tolerance * self.scale
    }
}

/// Identity with finite-difference jets of `u`.
pub fn integral_identity(coeffs: &CoefficientSet, u: &TensorField, v: &TensorField) -> Result<IdentityReport> {
    for f in [u, v] {
        if f.rank() != 0 {
            return Err(Error::RankMismatch { expected: 0, got: f.rank() });
        }
        f.check_compatible(&TensorField::zeros(coeffs.domain(), 0))?;
    }
    let top = 2 * coeffs.m - 1;
    if top + 3 > *coeffs.domain().shape().iter().min().unwrap_or(&0) {
        return Err(Error::GridTooSmall(format!("order {top} jets need at least {} points per axis", top + 3)));
    }
    let j = jets(u, top)?;
    integral_identity_with_jets(coeffs, &j, v, "finite-difference jets")
}

/// Identity with caller-supplied jets `∂^{⊗l}u`, `l = 0..2m`.
pub fn integral_identity_with_jets(
    coeffs: &CoefficientSet,
    jets_u: &[TensorField],
    v: &TensorField,
    descriptor: &str,
) -> Result<IdentityReport> {
    let top = 2 * coeffs.m - 1;
    if jets_u.len() <= top {
        return Err(Error::invalid(format!("need jets up to order {top}, got {}", jets_u.len().saturating_sub(1))));
    }
    let dom = coeffs.domain();
    let integrand = contract_with_jets(&coeffs.fields, &jets_u[..=top]);
    let w = dom.trapezoid_weights();
    let np = dom.len();
    let mut value = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for q in 0..np {
        value += integrand.values()[q] * v.values()[q] * w[q];
        let mut s = 0.0;
        for (l, a) in coeffs.fields.iter().enumerate() {
            let lay = layout(dom.dim(), l);
            for (c, &mult) in lay.multiplicities().iter().enumerate() {
                s += mult as f64 * a.component(c)[q].norm() * jets_u[l].component(c)[q].norm();
            }
        }
        scale += s * v.values()[q].norm() * w[q];
    }
    let h = dom.max_spacing();
    Ok(IdentityReport { value, scale, tolerance: h * h, descriptor: descriptor.to_string() })
}

/// Exact jets of a polynomial sampled on the grid.
pub fn polynomial_jets(u: &Polynomial, max_order: usize, domain: &GridDomain) -> Result<Vec<TensorField>> {
    let n = domain.dim();
    if u.dim() != n {
        return Err(Error::DimMismatch { expected: n, got: u.dim() });
    }
    (0..=max_order)
        .map(|l| {
            let lay = layout(n, l);
            let polys: Vec<_> = lay
                .iter()
                .map(|(_, labels)| {
                    let mut alpha = vec![0u32; n];
                    for &a in labels {
                        alpha[a as usize] += 1;
                    }
                    u.partial(&alpha).compile()
                })
                .collect();
            let axes = domain.axes();
            TensorField::from_values(domain, l, polys.iter().flat_map(|p| p.eval_tensor_grid(&axes)).collect())
        })
        .collect()
}

pub fn sample_polynomial(u: &Polynomial, domain: &GridDomain) -> TensorField {
    let values = u.compile().eval_tensor_grid(&domain.axes());
    TensorField::from_values(domain, 0, values).expect("one value per point")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_give_zero() {
        let dom = GridDomain::cube(2, 11, -1.0, 1.0).unwrap();
        let c = CoefficientSet::zeros(2, &dom).unwrap();
        let u = TensorField::scalar_from_fn(&dom, |x| Complex64::new(x[0] * x[1], 0.0));
        let r = integral_identity(&c, &u, &u).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn potential_term_integrates_q() {
        let dom = GridDomain::cube(2, 41, -1.0, 1.0).unwrap();
        let q = TensorField::scalar_from_fn(&dom, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            Complex64::new(if r2 < 0.64 { (1.0 - r2 / 0.64).powi(3) } else { 0.0 }, 0.0)
        });
        let c = CoefficientSet::new(1, vec![q.clone(), TensorField::zeros(&dom, 1)]).unwrap();
        let one = TensorField::scalar_from_fn(&dom, |_| Complex64::new(1.0, 0.0));
        let r = integral_identity(&c, &one, &one).unwrap();
        // exact value π·0.64/4
        let exact = std::f64::consts::PI * 0.64 / 4.0;
        assert!((r.value.re - exact).abs() < 1e-3, "{} vs {exact}", r.value.re);
    }

    #[test]
    fn operator_coefficients_use_d_convention() {
        let dom = GridDomain::cube(2, 9, -1.0, 1.0).unwrap();
        // ∂_1 = i D_1
        let c = CoefficientSet::from_operator(&PolyDiffOp::partial(2, 0), 1, &dom).unwrap();
        assert!((c.field(1).component(0)[0] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(CoefficientSet::new(2, vec![TensorField::zeros(&dom, 0)]).is_err());
    }
}
