//! Brute-force oracles on full `n^m` arrays, independent of the compressed
//! implementation.
#![allow(dead_code)]

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symtomo_core::symbolic::{imaginary_unit, integer, rational, PolyDiffOp, Polynomial, Scalar};
use symtomo_core::SymTensor;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_tensor(rng: &mut ChaCha8Rng, n: usize, m: usize) -> SymTensor {
    let len = symtomo_core::tensor::num_components(n, m);
    SymTensor::new(n, m, (0..len).map(|_| random_complex(rng)).collect()).unwrap()
}

pub fn random_real_tensor(rng: &mut ChaCha8Rng, n: usize, m: usize) -> SymTensor {
    let len = symtomo_core::tensor::num_components(n, m);
    let v: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SymTensor::from_real(n, m, &v).unwrap()
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 0.1 && r <= 1.0 {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

/// A full tensor as a flat row-major array of `n^m` entries.
#[derive(Clone, Debug)]
pub struct Full {
    pub n: usize,
    pub m: usize,
    pub data: Vec<Complex64>,
}

pub fn tuples(n: usize, m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    (0..m).map(|_| 0..n).multi_cartesian_product().collect()
}

fn flat(n: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &i| acc * n + i)
}

/// Nondecreasing tuples in the order they occur in a row-major sweep.
pub fn sorted_tuples(n: usize, m: usize) -> Vec<Vec<usize>> {
    tuples(n, m).into_iter().filter(|t| t.windows(2).all(|w| w[0] <= w[1])).collect()
}

impl Full {
    pub fn expand(t: &SymTensor) -> Self {
        let (n, m) = (t.dim(), t.rank());
        let keys = sorted_tuples(n, m);
        let data = tuples(n, m)
            .iter()
            .map(|tup| {
                let mut s = tup.clone();
                s.sort();
                t.components()[keys.iter().position(|k| *k == s).unwrap()]
            })
            .collect();
        Self { n, m, data }
    }

    pub fn compress(&self) -> SymTensor {
        let data = sorted_tuples(self.n, self.m).iter().map(|k| self.data[flat(self.n, k)]).collect();
        SymTensor::new(self.n, self.m, data).unwrap()
    }

    pub fn get(&self, t: &[usize]) -> Complex64 {
        self.data[flat(self.n, t)]
    }

    /// Average over all `m!` slot permutations.
    pub fn symmetrized(&self) -> Self {
        let (n, m) = (self.n, self.m);
        let perms: Vec<Vec<usize>> = (0..m).permutations(m).collect();
        let scale = 1.0 / perms.len() as f64;
        let data = tuples(n, m)
            .iter()
            .map(|t| {
                perms
                    .iter()
                    .map(|p| self.get(&p.iter().map(|&i| t[i]).collect::<Vec<_>>()))
                    .sum::<Complex64>()
                    * scale
            })
            .collect();
        Self { n, m, data }
    }

    pub fn outer(&self, other: &Full) -> Self {
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Self { n: self.n, m: self.m + other.m, data }
    }

    pub fn delta(n: usize) -> Self {
        let data = tuples(n, 2)
            .iter()
            .map(|t| Complex64::new(if t[0] == t[1] { 1.0 } else { 0.0 }, 0.0))
            .collect();
        Self { n, m: 2, data }
    }

    pub fn vector(x: &[Complex64]) -> Self {
        Self { n: x.len(), m: 1, data: x.to_vec() }
    }

    /// Contracts the last slot with `x` (no conjugation).
    pub fn contract_last(&self, x: &[Complex64]) -> Self {
        let n = self.n;
        let data = (0..self.data.len() / n)
            .map(|i| (0..n).map(|k| self.data[i * n + k] * x[k]).sum())
            .collect();
        Self { n, m: self.m - 1, data }
    }

    /// Trace over the last two slots.
    pub fn trace_last(&self) -> Self {
        let n = self.n;
        let data = (0..self.data.len() / (n * n))
            .map(|i| (0..n).map(|k| self.data[i * n * n + k * n + k]).sum())
            .collect();
        Self { n, m: self.m - 2, data }
    }

    pub fn frobenius(&self, other: &Full) -> Complex64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum()
    }
}

pub fn oracle_i_delta(f: &SymTensor) -> SymTensor {
    Full::expand(f).outer(&Full::delta(f.dim())).symmetrized().compress()
}

pub fn oracle_j_delta(f: &SymTensor) -> SymTensor {
    Full::expand(f).trace_last().compress()
}

pub fn oracle_i_vec(f: &SymTensor, x: &[Complex64]) -> SymTensor {
    Full::expand(f).outer(&Full::vector(x)).symmetrized().compress()
}

pub fn oracle_j_vec(f: &SymTensor, x: &[Complex64]) -> SymTensor {
    Full::expand(f).contract_last(x).compress()
}

/// Trace-free part by least-squares removal of the `i_δ` image, in the
/// Frobenius metric of full tensors.
pub fn oracle_trace_free_part(f: &SymTensor) -> SymTensor {
    let (n, m) = (f.dim(), f.rank());
    if m < 2 {
        return f.clone();
    }
    let basis = sorted_tuples(n, m - 2);
    let cols: Vec<Full> = (0..basis.len())
        .map(|c| Full::expand(&oracle_i_delta(&SymTensor::unit(n, m - 2, c))))
        .collect();
    let rows = cols[0].data.len();
    let a = DMatrix::from_fn(rows, cols.len(), |r, c| cols[c].data[r].re);
    let target = Full::expand(f);
    let mut out = target.data.clone();
    for part in 0..2 {
        let b = DVector::from_fn(rows, |r, _| if part == 0 { target.data[r].re } else { target.data[r].im });
        let coef = a.clone().svd(true, true).solve(&b, 1e-13).unwrap();
        let fit = &a * coef;
        for (o, v) in out.iter_mut().zip(fit.iter()) {
            if part == 0 {
                o.re -= v;
            } else {
                o.im -= v;
            }
        }
    }
    Full { n, m, data: out }.compress()
}

pub fn rel_err(a: &SymTensor, b: &SymTensor) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// `4 i_δ(∇φ)` written out by hand: the `(i,j,k)` entry is
/// `(4/3)(δ_ij φ_k + δ_ik φ_j + δ_jk φ_i)`.
pub fn four_i_delta_gradient(phi: &Polynomial) -> Vec<Polynomial> {
    let n = phi.dim();
    let grad: Vec<Polynomial> = (0..n).map(|j| phi.derivative(j)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let mut acc = Polynomial::zero(n);
                for (a, b, c) in [(i, j, k), (i, k, j), (j, k, i)] {
                    if a == b {
                        acc = &acc + &grad[c];
                    }
                }
                out.push(acc.scale(&rational(4, 3)));
            }
        }
    }
    out
}

/// `T = 2(∂_1 + i∂_2)` as an operator, composed independently of
/// `transport_apply`.
pub fn transport_power(n: usize, m: usize) -> PolyDiffOp {
    let t = PolyDiffOp::partial(n, 0)
        .add(&PolyDiffOp::partial(n, 1).scale(&imaginary_unit()))
        .scale(&integer(2));
    (0..m).fold(PolyDiffOp::identity(n), |acc, _| acc.compose(&t).unwrap())
}

pub fn small_int(rng: &mut ChaCha8Rng) -> Scalar {
    let re = rng.gen_range(-3..=3);
    let im = rng.gen_range(-2..=2);
    integer(re) + integer(im) * imaginary_unit()
}

pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, degree: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(n);
    for _ in 0..terms {
        let e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=degree)).collect();
        if e.iter().sum::<u32>() <= degree {
            p = &p + &Polynomial::monomial(n, e, small_int(rng));
        }
    }
    p
}
