//! Second-order finite differences for tensor fields.

use std::collections::HashMap;

use num_complex::Complex64;

use super::grid::GridDomain;
use super::tensor_field::TensorField;
use crate::error::{Error, Result};
use crate::tensor::{self, binomial};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// How stencils treat the faces of the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Central differences inside, second-order one-sided ones on faces.
    #[default]
    OneSided,
    /// Central differences everywhere with zero values outside the grid.
    /// Used by the decomposition solver, where it makes `d` and `−δ`
    /// exact transposes of each other.
    ZeroPadded,
}

/// Which first-order operator to iterate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffOp {
    SymDerivative,
    Divergence,
}

const MIN_POINTS: usize = 5;

fn check_grid(domain: &GridDomain) -> Result<()> {
    if domain.shape().iter().any(|&s| s < MIN_POINTS) {
        return Err(Error::GridTooSmall(format!(
            "finite differences need at least {MIN_POINTS} points per axis, got {:?}",
            domain.shape()
        )));
    }
    Ok(())
}

/// Finite-difference weights for the `order`-th derivative at offset 0 from
/// samples at integer `offsets` (Fornberg's recursion).
pub fn fd_weights(offsets: &[f64], order: usize) -> Vec<f64> {
    let np = offsets.len();
    let mut c = vec![vec![0.0; order + 1]; np];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    for i in 1..np {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Second-order stencil for the `order`-th derivative at index `i` of an
/// axis with `len` points: `(first index, weights)`.
fn stencil(i: usize, len: usize, order: usize) -> (usize, Vec<f64>) {
    let half = order.div_ceil(2);
    if i >= half && i + half < len {
        let offs: Vec<f64> = (0..=2 * half).map(|j| j as f64 - half as f64).collect();
        return (i - half, fd_weights(&offs, order));
    }
    let width = order + 2;
    let lo = if i < half { 0 } else { len - width };
    let offs: Vec<f64> = (lo..lo + width).map(|j| j as f64 - i as f64).collect();
    (lo, fd_weights(&offs, order))
}

/// `∂^order_axis` of one scalar component, second-order accurate.
pub fn derivative_1d(
    domain: &GridDomain,
    u: &[Complex64],
    axis: usize,
    order: usize,
    bc: Boundary,
) -> Vec<Complex64> {
    if order == 0 {
        return u.to_vec();
    }
    let s = domain.stride(axis);
    let len = domain.shape()[axis];
    let scale = domain.spacing()[axis].powi(-(order as i32));
    if bc == Boundary::ZeroPadded {
        assert!(order <= 2, "zero-padded stencils exist for orders 1 and 2");
        let w: &[f64] = if order == 1 { &[-0.5, 0.0, 0.5] } else { &[1.0, -2.0, 1.0] };
        return (0..u.len())
            .map(|p| {
                let i = (p / s) % len;
                let mut acc = ZERO;
                for (j, wj) in w.iter().enumerate() {
                    let q = i as isize + j as isize - 1;
                    if q >= 0 && (q as usize) < len && *wj != 0.0 {
                        acc += u[p - i * s + q as usize * s] * *wj;
                    }
                }
                acc * scale
            })
            .collect();
    }
    let stencils: Vec<(usize, Vec<f64>)> = (0..len).map(|i| stencil(i, len, order)).collect();
    (0..u.len())
        .map(|p| {
            let i = (p / s) % len;
            let base = p - i * s;
            let (lo, w) = &stencils[i];
            let acc: Complex64 = w.iter().enumerate().map(|(j, wj)| u[base + (lo + j) * s] * *wj).sum();
            acc * scale
        })
        .collect()
}

/// `∂_axis` of one scalar component.
pub fn partial(domain: &GridDomain, u: &[Complex64], axis: usize, bc: Boundary) -> Vec<Complex64> {
    derivative_1d(domain, u, axis, 1, bc)
}

/// `∂²_axis` of one scalar component.
pub fn second_partial(domain: &GridDomain, u: &[Complex64], axis: usize, bc: Boundary) -> Vec<Complex64> {
    derivative_1d(domain, u, axis, 2, bc)
}

/// Mixed partial `∂^α u` for per-axis counts `α`, as a product of 1-D stencils.
pub fn mixed_partial(domain: &GridDomain, u: &[Complex64], counts: &[u32]) -> Vec<Complex64> {
    let mut acc = u.to_vec();
    for (axis, &k) in counts.iter().enumerate() {
        if k > 0 {
            acc = derivative_1d(domain, &acc, axis, k as usize, Boundary::OneSided);
        }
    }
    acc
}

/// Symmetric derivative `d : rank m → rank m+1`.
pub fn sym_derivative(f: &TensorField) -> Result<TensorField> {
    sym_derivative_with(f, Boundary::OneSided)
}

pub fn sym_derivative_with(f: &TensorField, bc: Boundary) -> Result<TensorField> {
    let dom = f.domain();
    check_grid(dom)?;
    let (n, m) = (f.dim(), f.rank());
    let plan = tensor::plan::sym_product(n, m);
    let mut out = TensorField::zeros(dom, m + 1);
    let grads: Vec<Vec<Vec<Complex64>>> = (0..f.num_components())
        .map(|c| (0..n).map(|a| partial(dom, f.component(c), a, bc)).collect())
        .collect();
    for &(o, i, a, w) in &plan.entries {
        for (dst, src) in out.component_mut(o).iter_mut().zip(&grads[i][a]) {
            *dst += src * w;
        }
    }
    Ok(out)
}

/// Divergence `δ : rank m → rank m−1`.
pub fn divergence(f: &TensorField) -> Result<TensorField> {
    divergence_with(f, Boundary::OneSided)
}

pub fn divergence_with(f: &TensorField, bc: Boundary) -> Result<TensorField> {
    let dom = f.domain();
    check_grid(dom)?;
    let (n, m) = (f.dim(), f.rank());
    if m == 0 {
        return Err(Error::RankUnderflow { needed: 1, got: 0 });
    }
    let plan = tensor::plan::contraction(n, m);
    let mut out = TensorField::zeros(dom, m - 1);
    for &(o, i, a, w) in &plan.entries {
        let d = partial(dom, f.component(i), a, bc);
        for (dst, src) in out.component_mut(o).iter_mut().zip(&d) {
            *dst += src * w;
        }
    }
    Ok(out)
}

/// `k`-fold composition of `d` or `δ`.
///
/// With one-sided boundaries the composition is evaluated directly from
/// mixed partials (`d^k f = σ(∇^k f)`), which keeps second-order accuracy
/// up to the faces. Zero-padded boundaries compose the first-order
/// operators literally so adjointness is exact.
pub fn iterated(op: DiffOp, k: usize, f: &TensorField) -> Result<TensorField> {
    iterated_with(op, k, f, Boundary::OneSided)
}

pub fn iterated_with(op: DiffOp, k: usize, f: &TensorField, bc: Boundary) -> Result<TensorField> {
    if op == DiffOp::Divergence && k > f.rank() {
        return Err(Error::RankUnderflow { needed: k, got: f.rank() });
    }
    check_grid(f.domain())?;
    if k + 2 > *f.domain().shape().iter().min().unwrap_or(&0) {
        return Err(Error::GridTooSmall(format!("order {k} stencils need {} points per axis", k + 2)));
    }
    if bc == Boundary::ZeroPadded || k <= 1 {
        let mut acc = f.clone();
        for _ in 0..k {
            acc = match op {
                DiffOp::SymDerivative => sym_derivative_with(&acc, bc)?,
                DiffOp::Divergence => divergence_with(&acc, bc)?,
            };
        }
        return Ok(acc);
    }
    Ok(match op {
        DiffOp::SymDerivative => direct_sym_derivative(f, k),
        DiffOp::Divergence => direct_divergence(f, k),
    })
}

struct PartialCache<'a> {
    f: &'a TensorField,
    memo: HashMap<(usize, Vec<u32>), Vec<Complex64>>,
}

impl PartialCache<'_> {
    fn get(&mut self, comp: usize, counts: Vec<u32>) -> &[Complex64] {
        let f = self.f;
        self.memo
            .entry((comp, counts))
            .or_insert_with_key(|(c, a)| mixed_partial(f.domain(), f.component(*c), a))
    }
}

fn counts_of(n: usize, labels: &[u8]) -> Vec<u32> {
    let mut c = vec![0u32; n];
    for &l in labels {
        c[l as usize] += 1;
    }
    c
}

fn direct_sym_derivative(f: &TensorField, k: usize) -> TensorField {
    let (n, m) = (f.dim(), f.rank());
    let dst = tensor::layout(n, m + k);
    let src = tensor::layout(n, m);
    let w = 1.0 / binomial(m + k, k) as f64;
    let mut out = TensorField::zeros(f.domain(), m + k);
    let mut cache = PartialCache { f, memo: HashMap::new() };
    let mut chosen = Vec::with_capacity(k);
    let mut rest = Vec::with_capacity(m);
    for (o, idx) in dst.iter() {
        for mask in 0u32..(1 << (m + k)) {
            if mask.count_ones() as usize != k {
                continue;
            }
            chosen.clear();
            rest.clear();
            for (j, &v) in idx.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    chosen.push(v);
                } else {
                    rest.push(v);
                }
            }
            let d = cache.get(src.position(&rest), counts_of(n, &chosen));
            let d: Vec<Complex64> = d.to_vec();
            for (dst, v) in out.component_mut(o).iter_mut().zip(&d) {
                *dst += v * w;
            }
        }
    }
    out
}

fn direct_divergence(f: &TensorField, k: usize) -> TensorField {
    let (n, m) = (f.dim(), f.rank());
    let dst = tensor::layout(n, m - k);
    let beta = tensor::layout(n, k);
    let src = tensor::layout(n, m);
    let mut out = TensorField::zeros(f.domain(), m - k);
    let mut cache = PartialCache { f, memo: HashMap::new() };
    for (o, idx) in dst.iter() {
        for (b, labels) in beta.iter() {
            let mut full = idx.to_vec();
            full.extend_from_slice(labels);
            let w = beta.multiplicity(b) as f64;
            let d = cache.get(src.position(&full), counts_of(n, labels)).to_vec();
            for (dst, v) in out.component_mut(o).iter_mut().zip(&d) {
                *dst += v * w;
            }
        }
    }
    out
}

/// Componentwise Laplacian.
pub fn laplacian(f: &TensorField) -> Result<TensorField> {
    laplacian_with(f, Boundary::OneSided)
}

pub fn laplacian_with(f: &TensorField, bc: Boundary) -> Result<TensorField> {
    let dom = f.domain();
    check_grid(dom)?;
    let mut out = TensorField::zeros(dom, f.rank());
    for c in 0..f.num_components() {
        for a in 0..f.dim() {
            let d = second_partial(dom, f.component(c), a, bc);
            for (dst, src) in out.component_mut(c).iter_mut().zip(&d) {
                *dst += src;
            }
        }
    }
    Ok(out)
}

/// All derivatives `∂^idx u` for `|idx| ≤ max_order`; entry `l` is a
/// rank-`l` field.
pub fn jets(u: &TensorField, max_order: usize) -> Result<Vec<TensorField>> {
    if u.rank() != 0 {
        return Err(Error::RankMismatch { expected: 0, got: u.rank() });
    }
    (0..=max_order).map(|l| iterated(DiffOp::SymDerivative, l, u)).collect()
}

/// `Σ_l Σ_idx mult(idx)·a^l[idx]·D^idx u` with `D_j = (1/i)∂_j`; `a[l]`
/// must have rank `l`.
pub fn apply_coeff_op(a: &[TensorField], u: &TensorField) -> Result<TensorField> {
    if a.is_empty() {
        return Ok(TensorField::zeros(u.domain(), 0));
    }
    let top = a.len() - 1;
    let min_len = *u.domain().shape().iter().min().unwrap_or(&0);
    if top + MIN_POINTS > min_len + 2 {
        return Err(Error::GridTooSmall(format!(
            "order {top} derivatives need more than {min_len} points per axis"
        )));
    }
    let j = jets(u, top)?;
    Ok(contract_with_jets(a, &j))
}

/// `Σ_l (−i)^l ⟨a^l, ∂^l u⟩` given precomputed jets.
pub(crate) fn contract_with_jets(a: &[TensorField], jets: &[TensorField]) -> TensorField {
    let dom = jets[0].domain();
    let mut out = TensorField::zeros(dom, 0);
    let minus_i = Complex64::new(0.0, -1.0);
    for (l, al) in a.iter().enumerate() {
        let lay = tensor::layout(dom.dim(), l);
        let phase = minus_i.powu(l as u32);
        for (c, &mult) in lay.multiplicities().iter().enumerate() {
            let w = phase * mult as f64;
            let acc = out.component_mut(0);
            for ((o, x), y) in acc.iter_mut().zip(al.component(c)).zip(jets[l].component(c)) {
                *o += x * y * w;
            }
        }
    }
    out
}

/// Result of a boundary-jet check.
#[derive(Clone, Debug, PartialEq)]
pub struct JetCheck {
    pub passed: bool,
    /// Largest one-sided normal difference, relative to the field scale.
    pub residual: f64,
    pub threshold: f64,
}

/// Checks that the normal derivatives of orders `0..=order` vanish on every
/// face, using one-sided differences, against `10·h²`.
pub fn boundary_jets(f: &TensorField, order: usize) -> JetCheck {
    let dom = f.domain();
    let h = dom.max_spacing();
    let threshold = 10.0 * h * h;
    let scale = f.max_abs();
    if scale == 0.0 {
        return JetCheck { passed: true, residual: 0.0, threshold };
    }
    let np = dom.len();
    let mut worst: f64 = 0.0;
    for axis in 0..dom.dim() {
        let s = dom.stride(axis);
        let len = dom.shape()[axis];
        let ha = dom.spacing()[axis];
        for r in 0..=order.min(len - 1) {
            for p in 0..np {
                let i = (p / s) % len;
                for (face, dir) in [(0usize, 1isize), (len - 1, -1isize)] {
                    if i != face {
                        continue;
                    }
                    for c in 0..f.num_components() {
                        let u = f.component(c);
                        let mut acc = ZERO;
                        for j in 0..=r {
                            let q = (p as isize + dir * (j * s) as isize) as usize;
                            let sign = if (r - j) % 2 == 0 { 1.0 } else { -1.0 };
                            acc += u[q] * sign * binomial(r, j) as f64;
                        }
                        let d = acc.norm() / ha.powi(r as i32);
                        worst = worst.max(d / scale);
                    }
                }
            }
        }
    }
    JetCheck { passed: worst <= threshold, residual: worst, threshold }
}
