use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::cg::conjugate_gradient;
use crate::error::{Error, Result};
use crate::field::{boundary_jets, iterated_with, Boundary, DiffOp, GridDomain, TensorField};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// `f = f̃ + i_δ v + d^m φ` together with solve diagnostics.
#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub f_tilde: TensorField,
    /// Absent for rank one.
    pub v: Option<TensorField>,
    pub phi: TensorField,
    pub iterations: usize,
    pub cg_residual: f64,
    /// `‖f − f̃ − i_δ v − d^m φ‖ / ‖f‖`.
    pub reassembly_error: f64,
    /// Largest pointwise `|j_δ f̃|`.
    pub trace_residual: f64,
    /// `‖δ^m f̃‖ / ‖f‖` over the unknown region.
    pub divergence_residual: f64,
    /// Largest normal difference of `φ` up to order `m−1` at the faces.
    pub boundary_jet_residual: f64,
    /// Share of `φ` captured by polynomials of degree `< m`.
    pub low_degree_fraction: f64,
}

impl DecompositionResult {
    pub fn to_metrics(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        out.insert("cg_iterations".into(), self.iterations as f64);
        out.insert("cg_residual".into(), self.cg_residual);
        out.insert("reassembly_error".into(), self.reassembly_error);
        out.insert("trace_residual".into(), self.trace_residual);
        out.insert("divergence_residual".into(), self.divergence_residual);
        out.insert("boundary_jet_residual".into(), self.boundary_jet_residual);
        out.insert("low_degree_fraction".into(), self.low_degree_fraction);
        out.insert("norm_f_tilde".into(), self.f_tilde.norm_l2());
        out.insert("norm_v".into(), self.v.as_ref().map_or(0.0, |v| v.norm_l2()));
        out.insert("norm_phi".into(), self.phi.norm_l2());
        out
    }
}

/// Grid points carrying unknowns: at least `m` points away from every face.
pub fn unknown_points(domain: &GridDomain, m: usize) -> Vec<usize> {
    (0..domain.len()).filter(|&p| domain.depth(p) >= m).collect()
}

/// `d^m` with zero padding, the discretization used by the solver.
pub fn padded_derivative(phi: &TensorField, m: usize) -> Result<TensorField> {
    iterated_with(DiffOp::SymDerivative, m, phi, Boundary::ZeroPadded)
}

/// `δ^m` with zero padding.
pub fn padded_divergence(f: &TensorField, m: usize) -> Result<TensorField> {
    iterated_with(DiffOp::Divergence, m, f, Boundary::ZeroPadded)
}

fn sign(m: usize) -> f64 {
    if m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The solver operator `φ ↦ (−1)^m δ^m p d^m φ` on a full-grid scalar field.
pub fn solver_operator(phi: &TensorField, m: usize) -> Result<TensorField> {
    let pd = padded_derivative(phi, m)?.projection_p();
    Ok(padded_divergence(&pd, m)?.scale(sign(m)))
}

fn embed(domain: &GridDomain, points: &[usize], x: &[Complex64]) -> TensorField {
    let mut f = TensorField::zeros(domain, 0);
    let vals = f.values_mut();
    for (&p, &v) in points.iter().zip(x) {
        vals[p] = v;
    }
    f
}

fn restrict(f: &TensorField, points: &[usize]) -> Vec<Complex64> {
    points.iter().map(|&p| f.values()[p]).collect()
}

fn restricted_norm(f: &TensorField, points: &[usize]) -> f64 {
    let mut g = TensorField::zeros(f.domain(), f.rank());
    let np = f.points();
    for c in 0..f.num_components() {
        for &p in points {
            g.values_mut()[c * np + p] = f.values()[c * np + p];
        }
    }
    g.norm_l2()
}

fn low_degree_fraction(phi: &TensorField, points: &[usize], m: usize) -> f64 {
    let dom = phi.domain();
    let n = dom.dim();
    let basis = if m >= 2 { n + 1 } else { 1 };
    let norm: f64 = points.iter().map(|&p| phi.values()[p].norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || points.len() < basis {
        return 0.0;
    }
    let a = DMatrix::from_fn(points.len(), basis, |r, c| if c == 0 { 1.0 } else { dom.coord(points[r])[c - 1] });
    let svd = a.clone().svd(true, true);
    let mut fit_sq = 0.0;
    for part in [0, 1] {
        let b = DVector::from_iterator(
            points.len(),
            points.iter().map(|&p| if part == 0 { phi.values()[p].re } else { phi.values()[p].im }),
        );
        if let Ok(coef) = svd.solve(&b, 1e-12) {
            fit_sq += (&a * coef).norm_squared();
        }
    }
    fit_sq.sqrt() / norm
}

/// Trace-free Helmholtz decomposition of a rank-1 or rank-2 field by a
/// conjugate-gradient solve on the interior unknowns.
pub fn helmholtz_trace_free(f: &TensorField, tol: f64) -> Result<DecompositionResult> {
    let m = f.rank();
    if !(1..=2).contains(&m) {
        return Err(Error::Unsupported(format!("helmholtz decomposition needs rank 1 or 2, got {m}")));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid(format!("solver tolerance must lie in (0, 1), got {tol}")));
    }
    let dom = f.domain();
    let points = unknown_points(dom, m);
    if points.is_empty() {
        return Err(Error::GridTooSmall(format!("no interior unknowns for rank {m}")));
    }

    let pf = f.projection_p();
    let b = restrict(&padded_divergence(&pf, m)?.scale(sign(m)), &points);
    let apply = |x: &[Complex64]| -> Vec<Complex64> {
        let phi = embed(dom, &points, x);
        // shapes were validated above, so the operator cannot fail here
        restrict(&solver_operator(&phi, m).expect("validated grid"), &points)
    };
    let cg = conjugate_gradient(apply, &b, tol, 20 * points.len())?;
    let phi = embed(dom, &points, &cg.solution);

    let dphi = padded_derivative(&phi, m)?;
    let remainder = f - &dphi;
    let v = if m >= 2 { Some(remainder.j_delta().jdelta_idelta_solve()?) } else { None };
    let f_tilde = match &v {
        Some(v) => &remainder - &v.i_delta(),
        None => remainder,
    };

    let fnorm = f.norm_l2();
    let rel = |x: f64| if fnorm > 0.0 { x / fnorm } else { x };
    let mut rebuilt = &f_tilde + &dphi;
    if let Some(v) = &v {
        rebuilt = &rebuilt + &v.i_delta();
    }
    let reassembly_error = rel((f - &rebuilt).norm_l2());
    let trace_residual = if m >= 2 { f_tilde.j_delta().max_abs() } else { 0.0 };
    let divergence_residual = rel(restricted_norm(&padded_divergence(&f_tilde, m)?, &points));
    let boundary_jet_residual = boundary_jets(&phi, m - 1).residual;
    let low_degree_fraction = low_degree_fraction(&phi, &points, m);

    Ok(DecompositionResult {
        f_tilde,
        v,
        phi,
        iterations: cg.iterations,
        cg_residual: cg.relative_residual,
        reassembly_error,
        trace_residual,
        divergence_residual,
        boundary_jet_residual,
        low_degree_fraction,
    })
}
