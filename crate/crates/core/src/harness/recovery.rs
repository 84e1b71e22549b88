use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::coeffs::CoefficientSet;
use super::gauge::{cutoff_gauge, gauge_coefficients};
use super::phantoms::trace_free_bump;
use crate::error::{Error, Result};
use crate::field::{GridDomain, TensorField};
use crate::symbolic::Polynomial;
use crate::tensor::{j_vec, trace_free_basis, SymTensor};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Rank-two tensors of `R^3` sampled on the `(x_2, x_3)` slice grid.
#[derive(Clone, Debug)]
pub struct SliceTensors {
    pub domain: GridDomain,
    pub tensors: Vec<SymTensor>,
}

impl SliceTensors {
    fn zeros(domain: &GridDomain) -> Self {
        Self { domain: domain.clone(), tensors: vec![SymTensor::zeros(3, 2); domain.len()] }
    }

    /// Trapezoid L² norm with the multiplicity-weighted pairing.
    pub fn norm_l2(&self) -> f64 {
        let w = self.domain.trapezoid_weights();
        self.tensors.iter().zip(&w).map(|(t, w)| t.norm_sqr() * w).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let w = self.domain.trapezoid_weights();
        self.tensors.iter().zip(&other.tensors).zip(&w).map(|((a, b), w)| (a - b).norm_sqr() * w).sum::<f64>().sqrt()
    }

    fn scale(&self, s: f64) -> Self {
        Self { domain: self.domain.clone(), tensors: self.tensors.iter().map(|t| t.scale(s)).collect() }
    }
}

/// What the recovery pipeline is fed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Planted {
    Zero,
    TraceFreeBump,
    PureGauge,
}

impl std::str::FromStr for Planted {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Planted::Zero),
            "bump" => Ok(Planted::TraceFreeBump),
            "gauge" => Ok(Planted::PureGauge),
            other => Err(Error::invalid(format!("unknown planted set {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryConfig {
    /// Grid points per axis of the `[−1,1]^3` box.
    pub points: usize,
    pub directions: usize,
    /// Transverse offsets per direction.
    pub offsets: usize,
    /// Width of the transverse Gaussian, in grid spacings.
    pub sigma: f64,
    pub max_iterations: usize,
    /// CGLS stops once `‖Aᴴr‖ ≤ tol·‖Aᴴd‖`.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        Self { points: 33, directions: 64, offsets: 33, sigma: 0.65, max_iterations: 400, tolerance: 1e-4, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct RecoveryReport {
    pub planted: Planted,
    /// Trace-free part of `∫ a² dx_1` on the slice.
    pub truth: SliceTensors,
    pub recovered: SliceTensors,
    pub truth_norm: f64,
    pub recovered_norm: f64,
    /// `‖recovered − truth‖ / ‖truth‖`, absent when the truth vanishes.
    pub slice_error: Option<f64>,
    pub data_norm: f64,
    pub rows: usize,
    pub unknowns: usize,
    pub iterations: usize,
    pub relative_residual: f64,
    /// Square root of the extreme Ritz value ratio of `AᴴA`.
    pub condition_estimate: f64,
}

impl RecoveryReport {
    pub fn to_metrics(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        out.insert("planted".into(), format!("{:?}", self.planted));
        out.insert("truth_norm".into(), format!("{:.6e}", self.truth_norm));
        out.insert("recovered_norm".into(), format!("{:.6e}", self.recovered_norm));
        out.insert(
            "slice_error".into(),
            self.slice_error.map_or("n/a".to_string(), |e| format!("{e:.6e}")),
        );
        out.insert("data_norm".into(), format!("{:.6e}", self.data_norm));
        out.insert("rows".into(), self.rows.to_string());
        out.insert("unknowns".into(), self.unknowns.to_string());
        out.insert("iterations".into(), self.iterations.to_string());
        out.insert("relative_residual".into(), format!("{:.6e}", self.relative_residual));
        out.insert("condition_estimate".into(), format!("{:.6e}", self.condition_estimate));
        out
    }
}

/// Sparse rows `(column, value)`.
struct SparseRows {
    cols: usize,
    rows: Vec<Vec<(u32, Complex64)>>,
}

impl SparseRows {
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.rows.iter().map(|r| r.iter().map(|&(c, v)| v * x[c as usize]).sum()).collect()
    }

    /// Adjoint over real unknowns: `Re(Aᴴy)`.
    fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.cols];
        for (r, &yr) in self.rows.iter().zip(y) {
            for &(c, v) in r {
                out[c as usize] += v.conj() * yr;
            }
        }
        for z in &mut out {
            z.im = 0.0;
        }
        out
    }
}

struct CglsOutcome {
    x: Vec<Complex64>,
    iterations: usize,
    relative_residual: f64,
    condition: f64,
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn cgls(a: &SparseRows, d: &[Complex64], max_iter: usize, tol: f64) -> CglsOutcome {
    let mut x = vec![ZERO; a.cols];
    let mut r = d.to_vec();
    let mut s = a.adjoint(&r);
    let s0 = norm_sqr(&s).sqrt();
    let dn = norm_sqr(d).sqrt();
    if s0 == 0.0 {
        return CglsOutcome { x, iterations: 0, relative_residual: 0.0, condition: 1.0 };
    }
    let mut p = s.clone();
    let mut gamma = s0 * s0;
    let (mut alphas, mut betas) = (Vec::new(), Vec::new());
    let mut iterations = 0;
    for _ in 0..max_iter {
        let q = a.apply(&p);
        let qq = norm_sqr(&q);
        if qq == 0.0 {
            break;
        }
        let alpha = gamma / qq;
        for (xi, pi) in x.iter_mut().zip(&p) {
            *xi += pi * alpha;
        }
        for (ri, qi) in r.iter_mut().zip(&q) {
            *ri -= qi * alpha;
        }
        s = a.adjoint(&r);
        let g_new = norm_sqr(&s);
        let beta = g_new / gamma;
        alphas.push(alpha);
        betas.push(beta);
        iterations += 1;
        if g_new.sqrt() <= tol * s0 {
            break;
        }
        for (pi, si) in p.iter_mut().zip(&s) {
            *pi = si + *pi * beta;
        }
        gamma = g_new;
    }
    // Lanczos tridiagonal of AᴴA from the CG coefficients
    let k = alphas.len();
    let mut t = DMatrix::zeros(k.max(1), k.max(1));
    for i in 0..k {
        t[(i, i)] = 1.0 / alphas[i] + if i > 0 { betas[i - 1] / alphas[i - 1] } else { 0.0 };
        if i + 1 < k {
            let off = betas[i].sqrt() / alphas[i];
            t[(i, i + 1)] = off;
            t[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(t).eigenvalues;
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let condition = if lo > 0.0 { (hi / lo).sqrt() } else { f64::INFINITY };
    let relative_residual = if dn > 0.0 { norm_sqr(&r).sqrt() / dn } else { 0.0 };
    CglsOutcome { x, iterations, relative_residual, condition }
}

fn gaussian(t: f64, sigma: f64) -> (f64, f64) {
    let g = (-0.5 * (t / sigma).powi(2)).exp() / ((2.0 * PI).sqrt() * sigma);
    (g, -t / (sigma * sigma) * g)
}

struct Frame {
    zeta: Vec<Complex64>,
    eta: [f64; 3],
    normal: [f64; 3],
}

fn frames(count: usize) -> Vec<Frame> {
    (0..count)
        .map(|t| {
            let th = 2.0 * PI * t as f64 / count as f64;
            let (s, c) = th.sin_cos();
            let eta = [0.0, c, s];
            Frame {
                zeta: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, c), Complex64::new(0.0, s)],
                eta,
                normal: [0.0, -s, c],
            }
        })
        .collect()
}

fn dot3(a: &[f64; 3], x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(p, q)| p * q).sum()
}

fn offsets(count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.0];
    }
    (0..count).map(|j| -1.0 + 2.0 * j as f64 / (count - 1) as f64).collect()
}

/// Transport-admissible amplitude pairs `(a_0, b_0) = (y_2^j g, y_2^k)`,
/// giving line moments of order 2, 1 and 0.
const AMPLITUDES: [(i32, i32); 3] = [(1, 1), (1, 0), (0, 0)];

/// Coefficient of `h^{−2}` in `∫ Q(u)v` for `u = e^{ζ·x/h} y_2^j g(y_3 − s)`,
/// `v = e^{−ζ·x/h} y_2^k`, one value per (direction, amplitude pair, offset).
fn step_one_data(coeffs: &CoefficientSet, cfg: &RecoveryConfig, sigma: f64) -> Result<Vec<Complex64>> {
    let dom = coeffs.domain();
    let w = dom.trapezoid_weights();
    let (a2, a3) = (coeffs.field(2), coeffs.field(3));
    let has_top = a3.max_abs() > 0.0;
    let offs = offsets(cfg.offsets);
    let i = Complex64::new(0.0, 1.0);
    let mut data = Vec::with_capacity(cfg.directions * AMPLITUDES.len() * offs.len());
    let coords: Vec<Vec<f64>> = (0..dom.len()).map(|q| dom.coord(q)).collect();
    for fr in frames(cfg.directions) {
        // pointwise contractions along ζ
        let mut pts = Vec::new();
        for (q, x) in coords.iter().enumerate() {
            let t2 = a2.at(q);
            let a_zz = t2.contract_power(&fr.zeta)?;
            let (qe, qn) = if has_top {
                let v = j_vec(&j_vec(&a3.at(q), &fr.zeta)?, &fr.zeta)?;
                let c = v.components();
                let qe: Complex64 = (0..3).map(|i| c[i] * fr.eta[i]).sum();
                let qn: Complex64 = (0..3).map(|i| c[i] * fr.normal[i]).sum();
                (qe, qn)
            } else {
                (ZERO, ZERO)
            };
            if a_zz == ZERO && qe == ZERO && qn == ZERO {
                continue;
            }
            pts.push((w[q], dot3(&fr.eta, x), dot3(&fr.normal, x), a_zz, qe, qn));
        }
        for &(j, k) in &AMPLITUDES {
            for &s in &offs {
                let mut acc = ZERO;
                for &(wq, y2, y3, a_zz, qe, qn) in &pts {
                    let t = y3 - s;
                    if t.abs() > 8.0 * sigma {
                        continue;
                    }
                    let (g, dg) = gaussian(t, sigma);
                    let a0 = y2.powi(j);
                    let da0 = if j > 0 { j as f64 * y2.powi(j - 1) } else { 0.0 };
                    acc -= (a_zz * a0 * g - i * 3.0 * (qe * da0 * g + qn * a0 * dg)) * y2.powi(k) * wq;
                }
                data.push(acc);
            }
        }
    }
    Ok(data)
}

fn slice_model(slice: &GridDomain, cfg: &RecoveryConfig, sigma: f64, basis: &[SymTensor]) -> Result<(SparseRows, Vec<usize>)> {
    let interior: Vec<usize> = (0..slice.len()).filter(|&q| slice.depth(q) >= 1).collect();
    let w = slice.trapezoid_weights();
    let nb = basis.len();
    let offs = offsets(cfg.offsets);
    let mut rows = Vec::new();
    for fr in frames(cfg.directions) {
        let bz: Vec<Complex64> = basis.iter().map(|b| b.contract_power(&fr.zeta)).collect::<Result<_>>()?;
        let geo: Vec<(f64, f64)> = interior
            .iter()
            .map(|&q| {
                let x = slice.coord(q);
                let full = [0.0, x[0], x[1]];
                (dot3(&fr.eta, &full), dot3(&fr.normal, &full))
            })
            .collect();
        for &(j, k) in &AMPLITUDES {
            for &s in &offs {
                let mut row = Vec::new();
                for (idx, &q) in interior.iter().enumerate() {
                    let (y2, y3) = geo[idx];
                    let t = y3 - s;
                    if t.abs() > 8.0 * sigma {
                        continue;
                    }
                    let base = -w[q] * y2.powi(j + k) * gaussian(t, sigma).0;
                    for (b, z) in bz.iter().enumerate() {
                        row.push(((idx * nb + b) as u32, z * base));
                    }
                }
                rows.push(row);
            }
        }
    }
    Ok((SparseRows { cols: interior.len() * nb, rows }, interior))
}

fn planted_coefficients(planted: Planted, dom: &GridDomain, cfg: &RecoveryConfig) -> Result<CoefficientSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match planted {
        Planted::Zero => CoefficientSet::zeros(2, dom),
        Planted::TraceFreeBump => {
            let mut fields: Vec<TensorField> = (0..4).map(|l| TensorField::zeros(dom, l)).collect();
            fields[2] = trace_free_bump(dom, 2, &mut rng)?;
            CoefficientSet::new(2, fields)
        }
        Planted::PureGauge => {
            let r = Polynomial::parse("1 + 1/2*x1 + x2*x3 - 1/3*x2", 3)?;
            gauge_coefficients(2, &cutoff_gauge(&r, 2), dom)
        }
    }
}

/// Trace-free part of `∫ a² dx_1` on the `(x_2, x_3)` slice.
fn slice_truth(a2: &TensorField, slice: &GridDomain) -> SliceTensors {
    let dom = a2.domain();
    let n1 = dom.shape()[0];
    let h1 = dom.spacing()[0];
    let stride = dom.stride(0);
    let mut out = SliceTensors::zeros(slice);
    for q in 0..slice.len() {
        let mut acc = SymTensor::zeros(3, 2);
        for i in 0..n1 {
            let w = if i == 0 || i + 1 == n1 { 0.5 * h1 } else { h1 };
            acc += &a2.at(i * stride + q).scale(w);
        }
        out.tensors[q] = crate::tensor::projection_p(&acc);
    }
    out
}

/// Step-one pipeline for `m = 2`, `n = 3`: synthesize the leading
/// coefficient of the CGO identity over rotated frames, invert the
/// resulting weighted plane moments on the `x_1 = 0` slice by CGLS, and
/// compare with the trace-free part of the planted second-order
/// coefficient integrated along `x_1`.
pub fn moment_recovery_demo(planted: Planted, cfg: &RecoveryConfig) -> Result<RecoveryReport> {
    if cfg.points < 9 || cfg.points > 33 {
        return Err(Error::invalid(format!("recovery grid must have 9..=33 points per axis, got {}", cfg.points)));
    }
    if cfg.directions == 0 || cfg.offsets == 0 || !(cfg.sigma > 0.0) {
        return Err(Error::invalid("directions, offsets and sigma must be positive"));
    }
    let dom = GridDomain::cube(3, cfg.points, -1.0, 1.0)?;
    let slice = GridDomain::cube(2, cfg.points, -1.0, 1.0)?;
    let sigma = cfg.sigma * dom.max_spacing();
    let mut coeffs = planted_coefficients(planted, &dom, cfg)?;
    let mut truth = slice_truth(coeffs.field(2), &slice);
    if planted == Planted::PureGauge {
        // match the would-be signal of the bump
        let reference = slice_truth(planted_coefficients(Planted::TraceFreeBump, &dom, cfg)?.field(2), &slice);
        let s = reference.norm_l2() / truth.norm_l2();
        coeffs = coeffs.scale(s);
        truth = truth.scale(s);
    }

    let data = step_one_data(&coeffs, cfg, sigma)?;
    let basis: Vec<SymTensor> = trace_free_basis(3, 2)
        .iter()
        .map(|b| SymTensor::from_real(3, 2, b.as_slice()).expect("basis sized from layout"))
        .collect();
    let (model, interior) = slice_model(&slice, cfg, sigma, &basis)?;
    if model.rows.iter().map(Vec::len).sum::<usize>() > crate::mrt::MAX_MATRIX_ENTRIES {
        return Err(Error::SizeGuard("recovery model exceeds the matrix entry budget".into()));
    }
    let out = cgls(&model, &data, cfg.max_iterations, cfg.tolerance);

    let mut recovered = SliceTensors::zeros(&slice);
    let nb = basis.len();
    for (k, &q) in interior.iter().enumerate() {
        let mut t = SymTensor::zeros(3, 2);
        for (b, bt) in basis.iter().enumerate() {
            t += &bt.scale(out.x[k * nb + b]);
        }
        recovered.tensors[q] = t;
    }
    let truth_norm = truth.norm_l2();
    let recovered_norm = recovered.norm_l2();
    let slice_error = (truth_norm > 0.0).then(|| recovered.distance(&truth) / truth_norm);
    Ok(RecoveryReport {
        planted,
        truth,
        recovered,
        truth_norm,
        recovered_norm,
        slice_error,
        data_norm: norm_sqr(&data).sqrt(),
        rows: model.rows.len(),
        unknowns: model.cols,
        iterations: out.iterations,
        relative_residual: out.relative_residual,
        condition_estimate: out.condition,
    })
}
