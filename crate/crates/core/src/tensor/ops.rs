//! Pointwise operators on symmetric tensors: products and contractions
//! with `δ` and with a vector, the trace-free projection and the
//! trace-free decomposition.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::plan;
use super::sym::SymTensor;
use crate::error::{check_dim, Error, Result};

fn complex_vec<T: Copy + Into<Complex64>>(x: &[T]) -> Vec<Complex64> {
    x.iter().map(|&v| v.into()).collect()
}

fn wrap(n: usize, m: usize, data: Vec<Complex64>) -> SymTensor {
    SymTensor::new(n, m, data).expect("plan output has layout length")
}

/// Symmetric product with the Kronecker tensor, `S^m → S^{m+2}`.
pub fn i_delta(f: &SymTensor) -> SymTensor {
    let (n, m) = (f.dim(), f.rank());
    wrap(n, m + 2, plan::i_delta(n, m).apply(f.components()))
}

/// `i_δ` applied `k` times.
pub fn i_delta_pow(f: &SymTensor, k: usize) -> SymTensor {
    (0..k).fold(f.clone(), |acc, _| i_delta(&acc))
}

/// Trace over a pair of slots, `S^m → S^{m−2}`; zero scalar for `m < 2`.
pub fn j_delta(f: &SymTensor) -> SymTensor {
    let (n, m) = (f.dim(), f.rank());
    wrap(n, m.saturating_sub(2), plan::j_delta(n, m).apply(f.components()))
}

/// Symmetric product with a vector, `S^m → S^{m+1}`.
pub fn i_vec<T: Copy + Into<Complex64>>(f: &SymTensor, x: &[T]) -> Result<SymTensor> {
    let (n, m) = (f.dim(), f.rank());
    check_dim(n, x.len())?;
    Ok(wrap(n, m + 1, plan::sym_product(n, m).apply(f.components(), &complex_vec(x))))
}

/// Contraction of one slot with a vector (no conjugation), `S^m → S^{m−1}`.
pub fn j_vec<T: Copy + Into<Complex64>>(f: &SymTensor, x: &[T]) -> Result<SymTensor> {
    let (n, m) = (f.dim(), f.rank());
    check_dim(n, x.len())?;
    if m == 0 {
        return Err(Error::RankUnderflow { needed: 1, got: 0 });
    }
    Ok(wrap(n, m - 1, plan::contraction(n, m).apply(f.components(), &complex_vec(x))))
}

/// Solves `j_δ i_δ u = g` on S^m.
pub fn jdelta_idelta_solve(g: &SymTensor) -> Result<SymTensor> {
    let (n, m) = (g.dim(), g.rank());
    let inv = plan::jdelta_idelta_inverse(n, m);
    let inv = inv
        .as_ref()
        .as_ref()
        .ok_or_else(|| Error::Singular(format!("j_delta i_delta on S^{m}, n = {n}")))?;
    Ok(wrap(n, m, real_matvec(inv, g.components())))
}

/// Orthogonal projection onto trace-free tensors; identity for `m ≤ 1`.
pub fn projection_p(f: &SymTensor) -> SymTensor {
    let (n, m) = (f.dim(), f.rank());
    if m < 2 {
        return f.clone();
    }
    wrap(n, m, real_matvec(&plan::projection(n, m), f.components()))
}

pub(crate) fn real_matvec(a: &DMatrix<f64>, x: &[Complex64]) -> Vec<Complex64> {
    let mut y = vec![Complex64::new(0.0, 0.0); a.nrows()];
    for (c, xc) in x.iter().enumerate() {
        if *xc == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (r, yr) in y.iter_mut().enumerate() {
            *yr += xc * a[(r, c)];
        }
    }
    y
}

/// Trace-free decomposition `f = Σ_k i_δ^k b_k` with every `b_k` trace-free.
///
/// Entry `k` of the result has rank `l − 2k`. The top part comes from the
/// projection, and the remainder `(j_δ i_δ)^{-1} j_δ f` is decomposed
/// recursively.
pub fn trace_free_decompose(f: &SymTensor) -> Result<Vec<SymTensor>> {
    if f.rank() < 2 {
        return Ok(vec![f.clone()]);
    }
    let mut parts = vec![projection_p(f)];
    let w = jdelta_idelta_solve(&j_delta(f))?;
    parts.extend(trace_free_decompose(&w)?);
    Ok(parts)
}

/// Reassembles `Σ_k i_δ^k b_k`.
pub fn trace_free_reassemble(parts: &[SymTensor]) -> SymTensor {
    let mut acc = i_delta_pow(&parts[0], 0);
    for (k, b) in parts.iter().enumerate().skip(1) {
        acc += &i_delta_pow(b, k);
    }
    acc
}

/// Dense real matrix of the projection in compressed coordinates.
pub fn projection_matrix(n: usize, m: usize) -> DMatrix<f64> {
    plan::projection(n, m).as_ref().clone()
}

/// Dense matrices of `i_δ : S^m → S^{m+2}` and `j_δ : S^{m+2} → S^m`.
pub fn delta_matrices(n: usize, m: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    (plan::i_delta(n, m).to_dense(), plan::j_delta(n, m + 2).to_dense())
}

/// Orthonormal basis (multiplicity-weighted) of the real trace-free
/// subspace of S^m, as compressed component vectors.
pub fn trace_free_basis(n: usize, m: usize) -> Vec<DVector<f64>> {
    let p = plan::projection(n, m);
    let lay = plan::layout(n, m);
    let w: Vec<f64> = lay.multiplicities().iter().map(|&v| v as f64).collect();
    let dot = |a: &DVector<f64>, b: &DVector<f64>| -> f64 {
        a.iter().zip(b.iter()).zip(&w).map(|((x, y), w)| x * y * w).sum()
    };
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for c in 0..lay.len() {
        let mut v = p.column(c).into_owned();
        // two passes of Gram-Schmidt for stability
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(&v, b);
                v -= b * proj;
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-9 {
            basis.push(v / norm);
        }
    }
    basis
}
