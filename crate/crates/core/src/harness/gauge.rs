use std::collections::BTreeMap;

use num_complex::Complex64;

use super::coeffs::{integral_identity_with_jets, polynomial_jets, sample_polynomial, CoefficientSet};
use crate::error::{Error, Result};
use crate::field::{boundary_jets, GridDomain};
use crate::symbolic::{eval_components, gauge_top_coefficient, integer, polyharmonic_basis, PolyDiffOp, Polynomial};

/// Outcome of the gauge experiment for one `φ`.
#[derive(Clone, Debug)]
pub struct GaugeReport {
    pub m: usize,
    pub n: usize,
    /// Exact polynomial equality of the order `2m−1` coefficient of both the
    /// conjugated operator and its linearization with `(−1)^m 2m i_δ^{m−1}∇φ`.
    pub top_exact: bool,
    /// Largest sampled deviation of the same comparison on the grid,
    /// relative to the largest expected entry.
    pub top_max_deviation: f64,
    pub identity_pairs: usize,
    pub identity_max_relative: f64,
    pub identity_tolerance: f64,
    pub identity_passed: bool,
    /// Constant `φ` leaves the operator unchanged.
    pub constant_phi_trivial: bool,
    pub phi_boundary_jet_residual: f64,
}

impl GaugeReport {
    pub fn passed(&self) -> bool {
        self.top_exact && self.identity_passed && self.constant_phi_trivial
    }

    pub fn to_metrics(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        out.insert("m".into(), self.m.to_string());
        out.insert("n".into(), self.n.to_string());
        out.insert("top_exact".into(), self.top_exact.to_string());
        out.insert("top_max_deviation".into(), format!("{:.6e}", self.top_max_deviation));
        out.insert("identity_pairs".into(), self.identity_pairs.to_string());
        out.insert("identity_max_relative".into(), format!("{:.6e}", self.identity_max_relative));
        out.insert("identity_tolerance".into(), format!("{:.6e}", self.identity_tolerance));
        out.insert("identity_passed".into(), self.identity_passed.to_string());
        out.insert("constant_phi_trivial".into(), self.constant_phi_trivial.to_string());
        out.insert("phi_boundary_jet_residual".into(), format!("{:.6e}", self.phi_boundary_jet_residual));
        out
    }
}

/// `r(x)·Π(1 − x_j²)^{4m}`: normal jets up to order `4m−1` vanish on the
/// faces of `[−1,1]^n`. Twice the order the identity needs, so the
/// integrand also vanishes to high order and the trapezoid rule is sharp.
pub fn cutoff_gauge(r: &Polynomial, m: usize) -> Polynomial {
    let n = r.dim();
    let mut out = r.clone();
    for j in 0..n {
        let xj = Polynomial::var(n, j);
        let factor = &Polynomial::one(n) - &(&xj * &xj);
        out = &out * &factor.pow(4 * m as u32);
    }
    out
}

/// The first-order gauge coefficients `[(−Δ)^m, φ]` on a grid.
pub fn gauge_coefficients(m: usize, phi: &Polynomial, domain: &GridDomain) -> Result<CoefficientSet> {
    let op = PolyDiffOp::polyharmonic(phi.dim(), m).commutator(phi)?;
    CoefficientSet::from_operator(&op, m, domain)
}

/// Checks the gauge structure of `e^{−φ}(−Δ)^m e^{φ}` for `m ∈ {2, 3}`.
///
/// The integral identity is evaluated for the linearized change
/// `[(−Δ)^m, φ]` over the first `basis_size` polyharmonic polynomials.
pub fn gauge_experiment(
    m: usize,
    phi: &Polynomial,
    domain: &GridDomain,
    basis_size: usize,
    max_degree: u32,
) -> Result<GaugeReport> {
    if !(2..=3).contains(&m) {
        return Err(Error::Unsupported(format!("gauge experiment supports m = 2, 3, got {m}")));
    }
    let n = domain.dim();
    if phi.dim() != n {
        return Err(Error::DimMismatch { expected: n, got: phi.dim() });
    }
    let top = 2 * m - 1;
    let base = PolyDiffOp::polyharmonic(n, m);
    let expected = gauge_top_coefficient(phi, m)?;
    let conjugated = base.conjugate_exp_truncated(phi, top)?;
    let linear = base.commutator(phi)?;
    let top_exact = conjugated.coefficient_polys(top) == expected && linear.coefficient_polys(top) == expected;

    let coeffs = CoefficientSet::from_operator(&linear, m, domain)?;
    // back to the ∂ convention for the comparison
    let to_partial = Complex64::new(0.0, -1.0).powu(top as u32);
    let (mut deviation, mut size): (f64, f64) = (0.0, 0.0);
    for q in 0..domain.len() {
        let want = eval_components(&expected, n, top, &domain.coord(q))?;
        let got = coeffs.top().at(q).scale(to_partial);
        deviation = deviation.max((&got - &want).max_abs());
        size = size.max(want.max_abs());
    }
    let top_max_deviation = if size > 0.0 { deviation / size } else { deviation };

    let basis: Vec<Polynomial> = polyharmonic_basis(m, max_degree, n)?.into_iter().take(basis_size).collect();
    let jets: Vec<_> = basis.iter().map(|u| polynomial_jets(u, top, domain)).collect::<Result<_>>()?;
    let samples: Vec<_> = basis.iter().map(|v| sample_polynomial(v, domain)).collect();
    let mut identity_max_relative: f64 = 0.0;
    let mut identity_passed = true;
    let mut identity_tolerance = 0.0;
    let mut pairs = 0;
    for ju in &jets {
        for v in &samples {
            let r = integral_identity_with_jets(&coeffs, ju, v, "polyharmonic pair")?;
            identity_max_relative = identity_max_relative.max(r.relative());
            identity_passed &= r.within_tolerance();
            identity_tolerance = r.tolerance;
            pairs += 1;
        }
    }

    let constant = Polynomial::constant(n, integer(7));
    let constant_phi_trivial =
        base.commutator(&constant)?.is_zero() && base.conjugate_exp(&constant)? == base;
    let phi_boundary_jet_residual = boundary_jets(&sample_polynomial(phi, domain), top).residual;

    Ok(GaugeReport {
        m,
        n,
        top_exact,
        top_max_deviation,
        identity_pairs: pairs,
        identity_max_relative,
        identity_tolerance,
        identity_passed,
        constant_phi_trivial,
        phi_boundary_jet_residual,
    })
}
