//! Fixtures shared by the benchmarks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symtomo_core::algebra::random_smooth_field;
use symtomo_core::tensor::num_components;
use symtomo_core::{GridDomain, SymTensor, TensorField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_tensor(rng: &mut ChaCha8Rng, n: usize, m: usize) -> SymTensor {
    let data = (0..num_components(n, m)).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    SymTensor::new(n, m, data).expect("component count matches")
}

/// Smooth fields of ranks `0..=m`, zero near the faces.
pub fn mixed_fields(domain: &GridDomain, m: usize, seed: u64) -> Vec<TensorField> {
    let mut r = rng(seed);
    (0..=m).map(|p| random_smooth_field(domain, p, false, &mut r)).collect()
}
