//! Seeded, roughly equidistributed ray families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ray::Ray;
use super::transform::orthonormal_completion;
use crate::field::GridDomain;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// `count` unit directions: golden-angle spacing on the circle for `n = 2`,
/// a Fibonacci lattice on the sphere for `n = 3`, and seeded Gaussian
/// directions otherwise.
pub fn fibonacci_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    match n {
        1 => (0..count).map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }]).collect(),
        2 => (0..count)
            .map(|i| {
                let th = 2.0 * PI * ((i as f64 + 0.5) * GOLDEN).fract();
                vec![th.cos(), th.sin()]
            })
            .collect(),
        3 => (0..count)
            .map(|i| {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let th = 2.0 * PI * (i as f64 * GOLDEN).fract();
                vec![r * th.cos(), r * th.sin(), z]
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
                    v.iter().map(|x| x / r).collect()
                })
                .collect()
        }
    }
}

/// Rays with equidistributed directions whose base points are the box
/// centre shifted perpendicular to the ray by uniform random offsets in
/// `[−radius, radius]` per transverse axis.
pub fn fibonacci_rays(domain: &GridDomain, count: usize, k: usize, radius: f64, seed: u64) -> Vec<Ray> {
    let n = domain.dim();
    let centre: Vec<f64> = domain.origin().iter().zip(domain.upper()).map(|(a, b)| 0.5 * (a + b)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fibonacci_directions(n, count, seed)
        .into_iter()
        .map(|dir| {
            let mut base = centre.clone();
            for v in orthonormal_completion(n, &[dir.clone()]) {
                let s = rng.gen_range(-radius..=radius);
                for (b, x) in base.iter_mut().zip(&v) {
                    *b += s * x;
                }
            }
            Ray::new(base, dir, k).expect("unit direction")
        })
        .collect()
}
