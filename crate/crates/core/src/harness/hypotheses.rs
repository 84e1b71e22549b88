use std::fmt;
use std::str::FromStr;

use super::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::field::{boundary_jets, derivative_1d, iterated, Boundary, DiffOp, TensorField};

/// Hypotheses placed on the top coefficient `a^{2m−1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// `δ^{2m−1} a^{2m−1} = 0`.
    DivFree,
    /// `j_δ a^{2m−1} = 0`.
    TraceFree,
    /// `∂_ν^r a^{2m−1} = 0` on the boundary, `r ≤ 2m−1`.
    BoundaryJets,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 3] = [Hypothesis::DivFree, Hypothesis::TraceFree, Hypothesis::BoundaryJets];
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::DivFree => "div-free",
            Hypothesis::TraceFree => "trace-free",
            Hypothesis::BoundaryJets => "boundary-jets",
        })
    }
}

impl FromStr for Hypothesis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "div-free" => Ok(Hypothesis::DivFree),
            "trace-free" => Ok(Hypothesis::TraceFree),
            "boundary-jets" => Ok(Hypothesis::BoundaryJets),
            other => Err(Error::invalid(format!("unknown hypothesis {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisResult {
    pub hypothesis: Hypothesis,
    pub passed: bool,
    pub residual: f64,
    pub threshold: f64,
}

/// `‖δ^k a‖` relative to the size of the pure `k`-th axis derivatives of
/// `a`, so the residual measures stencil error only.
pub fn divergence_residual(a: &TensorField, k: usize) -> Result<f64> {
    let div = iterated(DiffOp::Divergence, k, a)?;
    let dom = a.domain();
    let mut scale_sq = 0.0;
    for c in 0..a.num_components() {
        for axis in 0..dom.dim() {
            let d = derivative_1d(dom, a.component(c), axis, k, Boundary::OneSided);
            let f = TensorField::from_values(dom, 0, d)?;
            scale_sq += f.norm_l2().powi(2);
        }
    }
    let scale = scale_sq.sqrt();
    Ok(if scale > 0.0 { div.norm_l2() / scale } else { div.norm_l2() })
}

pub fn hypothesis_check(coeffs: &CoefficientSet, which: Hypothesis) -> Result<HypothesisResult> {
    let a = coeffs.top();
    let k = 2 * coeffs.half_order() - 1;
    let h = coeffs.domain().max_spacing();
    let (residual, threshold) = match which {
        Hypothesis::TraceFree => {
            let scale = a.max_abs().max(1.0);
            (a.j_delta().max_abs() / scale, 1e-10)
        }
        Hypothesis::DivFree => (divergence_residual(a, k)?, 100.0 * h * h),
        Hypothesis::BoundaryJets => {
            let j = boundary_jets(a, k);
            (j.residual, j.threshold)
        }
    };
    Ok(HypothesisResult { hypothesis: which, passed: residual <= threshold, residual, threshold })
}
