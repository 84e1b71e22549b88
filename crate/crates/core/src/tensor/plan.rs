//! Precomputed sparse index maps for the pointwise operators.
//!
//! Every operator on compressed tensors is a fixed sparse linear map for a
//! given `(n, m)`. Building one walks the layout once; after that, applying
//! it at each grid point is a tight loop. Maps are cached per `(n, m)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;

use super::index::{binomial, Layout};

pub(crate) struct Cache<T>(OnceLock<Mutex<HashMap<(usize, usize), Arc<T>>>>);

impl<T> Cache<T> {
    pub(crate) const fn new() -> Self {
        Self(OnceLock::new())
    }

    pub(crate) fn get_or(&self, key: (usize, usize), build: impl FnOnce() -> T) -> Arc<T> {
        let map = self.0.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(hit) = map.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let built = Arc::new(build());
        map.lock().unwrap().entry(key).or_insert(built).clone()
    }
}

pub(crate) fn layout(n: usize, m: usize) -> Arc<Layout> {
    static LAYOUTS: Cache<Layout> = Cache::new();
    LAYOUTS.get_or((n, m), || Layout::new(n, m))
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub out: usize,
    pub inp: usize,
    pub coef: Ratio<i64>,
}

/// A sparse linear map with small rational coefficients.
#[derive(Clone, Debug)]
pub struct LinearMap {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Entry>,
    weights: Vec<f64>,
}

impl LinearMap {
    fn new(rows: usize, cols: usize, mut entries: Vec<Entry>) -> Self {
        entries.sort_by_key(|e| (e.out, e.inp));
        entries.dedup_by(|b, a| {
            if a.out == b.out && a.inp == b.inp {
                a.coef += b.coef;
                true
            } else {
                false
            }
        });
        entries.retain(|e| e.coef != Ratio::from_integer(0));
        let weights = entries
            .iter()
            .map(|e| *e.coef.numer() as f64 / *e.coef.denom() as f64)
            .collect();
        Self { rows, cols, entries, weights }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        self.apply_add(x, &mut y, 1.0);
        y
    }

    /// `y += scale * M x`.
    pub fn apply_add(&self, x: &[Complex64], y: &mut [Complex64], scale: f64) {
        for (e, w) in self.entries.iter().zip(&self.weights) {
            y[e.out] += x[e.inp] * (w * scale);
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.rows, self.cols);
        for (e, w) in self.entries.iter().zip(&self.weights) {
            d[(e.out, e.inp)] += w;
        }
        d
    }
}

/// Sparse map whose coefficients also carry an axis label; applied against a
/// vector (`i_x`, `j_x`) or against partial derivatives (`d`, `δ`).
#[derive(Clone, Debug)]
pub struct AxisMap {
    pub rows: usize,
    pub cols: usize,
    /// `(out, in, axis, weight)`
    pub entries: Vec<(usize, usize, usize, f64)>,
}

impl AxisMap {
    pub fn apply(&self, f: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        for &(o, i, a, w) in &self.entries {
            y[o] += f[i] * x[a] * w;
        }
        y
    }
}

fn ratio(num: u64, den: u64) -> Ratio<i64> {
    Ratio::new(num as i64, den as i64)
}

/// `i_δ : S^m → S^{m+2}`.
pub(crate) fn i_delta(n: usize, m: usize) -> Arc<LinearMap> {
    static CACHE: Cache<LinearMap> = Cache::new();
    CACHE.get_or((n, m), || {
        let src = layout(n, m);
        let dst = layout(n, m + 2);
        let pairs = binomial(m + 2, 2);
        let mut entries = Vec::new();
        let mut rest = Vec::with_capacity(m);
        for (out, idx) in dst.iter() {
            for j in 0..idx.len() {
                for k in j + 1..idx.len() {
                    if idx[j] != idx[k] {
                        continue;
                    }
                    rest.clear();
                    rest.extend(
                        idx.iter()
                            .enumerate()
                            .filter(|&(p, _)| p != j && p != k)
                            .map(|(_, &v)| v),
                    );
                    entries.push(Entry { out, inp: src.position(&rest), coef: ratio(1, pairs) });
                }
            }
        }
        LinearMap::new(dst.len(), src.len(), entries)
    })
}

/// `j_δ : S^m → S^{m−2}`; the zero map onto S^0 for `m < 2`.
pub(crate) fn j_delta(n: usize, m: usize) -> Arc<LinearMap> {
    static CACHE: Cache<LinearMap> = Cache::new();
    CACHE.get_or((n, m), || {
        if m < 2 {
            return LinearMap::new(1, layout(n, m).len(), Vec::new());
        }
        let src = layout(n, m);
        let dst = layout(n, m - 2);
        let mut entries = Vec::new();
        for (out, _) in dst.iter() {
            for k in 0..n as u8 {
                let inp = dst.position_with(out, &[k, k]);
                entries.push(Entry { out, inp, coef: ratio(1, 1) });
            }
        }
        LinearMap::new(dst.len(), src.len(), entries)
    })
}

/// Symmetric product pattern `S^m → S^{m+1}`: out[idx] = (1/(m+1)) Σ_j in[idx∖j]·x[idx_j].
pub(crate) fn sym_product(n: usize, m: usize) -> Arc<AxisMap> {
    static CACHE: Cache<AxisMap> = Cache::new();
    CACHE.get_or((n, m), || {
        let src = layout(n, m);
        let dst = layout(n, m + 1);
        let w = 1.0 / (m + 1) as f64;
        let mut entries = Vec::new();
        let mut rest = Vec::with_capacity(m);
        for (out, idx) in dst.iter() {
            let mut j = 0;
            while j < idx.len() {
                // runs of equal labels contribute identical terms
                let run = idx[j..].iter().take_while(|&&v| v == idx[j]).count();
                rest.clear();
                rest.extend_from_slice(&idx[..j]);
                rest.extend_from_slice(&idx[j + 1..]);
                entries.push((out, src.position(&rest), idx[j] as usize, w * run as f64));
                j += run;
            }
        }
        AxisMap { rows: dst.len(), cols: src.len(), entries }
    })
}

/// Contraction pattern `S^m → S^{m−1}`: out[idx'] = Σ_k in[idx'+k]·x[k]. Requires `m ≥ 1`.
pub(crate) fn contraction(n: usize, m: usize) -> Arc<AxisMap> {
    static CACHE: Cache<AxisMap> = Cache::new();
    CACHE.get_or((n, m), || {
        let src = layout(n, m);
        let dst = layout(n, m - 1);
        let mut entries = Vec::new();
        for (out, _) in dst.iter() {
            for k in 0..n {
                entries.push((out, dst.position_with(out, &[k as u8]), k, 1.0));
            }
        }
        AxisMap { rows: dst.len(), cols: src.len(), entries }
    })
}

/// Dense inverse of `j_δ i_δ` on S^m, or `None` when singular.
pub(crate) fn jdelta_idelta_inverse(n: usize, m: usize) -> Arc<Option<DMatrix<f64>>> {
    static CACHE: Cache<Option<DMatrix<f64>>> = Cache::new();
    CACHE.get_or((n, m), || {
        let prod = j_delta(n, m + 2).to_dense() * i_delta(n, m).to_dense();
        prod.lu().try_inverse()
    })
}

/// Dense matrix of the trace-free projection on S^m.
pub(crate) fn projection(n: usize, m: usize) -> Arc<DMatrix<f64>> {
    static CACHE: Cache<DMatrix<f64>> = Cache::new();
    CACHE.get_or((n, m), || {
        let len = layout(n, m).len();
        let id = DMatrix::identity(len, len);
        if m < 2 {
            return id;
        }
        let inv = jdelta_idelta_inverse(n, m - 2);
        let inv = inv.as_ref().as_ref().expect("j_δ i_δ is invertible");
        id - i_delta(n, m - 2).to_dense() * inv * j_delta(n, m).to_dense()
    })
}
