use nalgebra::DMatrix;

use crate::error::{check_dim, Error, Result};
use crate::tensor::{i_vec, j_vec, projection_p, SymTensor};

fn check_direction(xi: &[f64]) -> Result<()> {
    if xi.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroDirection);
    }
    Ok(())
}

/// `p i_ξ^m φ` for a tensor `φ`.
pub fn symbol_image(phi: &SymTensor, xi: &[f64], m: usize) -> Result<SymTensor> {
    check_direction(xi)?;
    check_dim(phi.dim(), xi.len())?;
    let mut acc = phi.clone();
    for _ in 0..m {
        acc = i_vec(&acc, xi)?;
    }
    Ok(projection_p(&acc))
}

/// Rayleigh value `⟨j_ξ^m p i_ξ^m φ, φ⟩ = ‖p i_ξ^m φ‖²` at `φ = 1`.
pub fn symbol_operator(xi: &[f64], m: usize) -> Result<f64> {
    let n = xi.len();
    Ok(symbol_image(&SymTensor::scalar(n, 1.0), xi, m)?.norm_sqr())
}

/// Matrix of `φ ↦ j_ξ^m p i_ξ^m φ` on tensors of rank `rank`, in compressed
/// coordinates (a 1×1 matrix for scalars).
pub fn symbol_matrix(xi: &[f64], m: usize, rank: usize) -> Result<DMatrix<f64>> {
    check_direction(xi)?;
    let n = xi.len();
    let len = crate::tensor::num_components(n, rank);
    let mut out = DMatrix::zeros(len, len);
    for c in 0..len {
        let mut t = symbol_image(&SymTensor::unit(n, rank, c), xi, m)?;
        for _ in 0..m {
            t = j_vec(&t, xi)?;
        }
        for (r, v) in t.components().iter().enumerate() {
            out[(r, c)] = v.re;
        }
    }
    Ok(out)
}

/// Both sides of `(r+1)‖p i_ξ f‖² = |ξ|²‖f‖² + r(1 − 2/(n+2r−2))‖j_ξ f‖²`
/// for a trace-free `f` of rank `r`.
pub fn symbol_identity_sides(f: &SymTensor, xi: &[f64]) -> Result<(f64, f64)> {
    check_direction(xi)?;
    let (n, r) = (f.dim(), f.rank());
    let xi2: f64 = xi.iter().map(|v| v * v).sum();
    let lhs = (r + 1) as f64 * projection_p(&i_vec(f, xi)?).norm_sqr();
    let rhs = if r == 0 {
        xi2 * f.norm_sqr()
    } else {
        let c = 1.0 - 2.0 / (n + 2 * r - 2) as f64;
        xi2 * f.norm_sqr() + r as f64 * c * j_vec(f, xi)?.norm_sqr()
    };
    Ok((lhs, rhs))
}
