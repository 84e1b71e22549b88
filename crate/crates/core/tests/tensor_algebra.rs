mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use symtomo_core::tensor::{
    i_delta, i_delta_pow, i_vec, j_delta, j_vec, jdelta_idelta_solve, projection_matrix,
    projection_p, symmetrize, trace_free_decompose, trace_free_reassemble, delta_matrices,
};
use symtomo_core::SymTensor;

fn cvec(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

#[test]
fn symmetrize_matches_permutation_average() {
    let mut r = rng(3);
    let raw: Vec<Complex64> = (0..27).map(|_| random_complex(&mut r)).collect();
    let fast = symmetrize(&raw, 3, 3).unwrap();
    let slow = Full { n: 3, m: 3, data: raw }.symmetrized().compress();
    assert!(rel_err(&fast, &slow) < 1e-14);
}

#[test]
fn operators_match_full_tensor_oracles() {
    let mut r = rng(11);
    for n in 1..=4 {
        for m in 0..=4 {
            let f = random_tensor(&mut r, n, m);
            let x: Vec<Complex64> = (0..n).map(|_| random_complex(&mut r)).collect();
            assert!(rel_err(&i_delta(&f), &oracle_i_delta(&f)) < 1e-13, "i_delta n={n} m={m}");
            assert!(rel_err(&i_vec(&f, &x).unwrap(), &oracle_i_vec(&f, &x)) < 1e-13);
            if m >= 2 {
                assert!(rel_err(&j_delta(&f), &oracle_j_delta(&f)) < 1e-13);
            }
            if m >= 1 {
                assert!(rel_err(&j_vec(&f, &x).unwrap(), &oracle_j_vec(&f, &x)) < 1e-13);
            }
        }
    }
}

#[test]
fn inner_equals_frobenius_pairing() {
    let mut r = rng(5);
    for n in 1..=4 {
        for m in 0..=4 {
            let (f, g) = (random_tensor(&mut r, n, m), random_tensor(&mut r, n, m));
            let frob = Full::expand(&f).frobenius(&Full::expand(&g));
            assert!((f.inner(&g).unwrap() - frob).norm() < 1e-12 * frob.norm().max(1.0));
        }
    }
}

#[test]
fn projection_matches_least_squares_oracle() {
    let mut r = rng(17);
    for n in 2..=4 {
        for m in 2..=4 {
            let f = random_tensor(&mut r, n, m);
            assert!(rel_err(&projection_p(&f), &oracle_trace_free_part(&f)) < 1e-10);
        }
    }
}

#[test]
fn projection_matrix_identities() {
    for n in 2..=4 {
        for m in 2..=4 {
            let p = projection_matrix(n, m);
            let lay = symtomo_core::tensor::layout(n, m);
            let w = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                lay.len(),
                lay.multiplicities().iter().map(|&v| v as f64),
            ));
            let (idelta, _) = delta_matrices(n, m - 2);
            let (_, jdelta) = delta_matrices(n, m - 2);
            assert!((&p * &p - &p).amax() < 1e-12);
            // self-adjoint in the weighted pairing: W P = Pᵀ W
            assert!((&w * &p - p.transpose() * &w).amax() < 1e-12);
            assert!((&p * idelta).amax() < 1e-12);
            assert!((jdelta * &p).amax() < 1e-12);
        }
    }
}

#[test]
fn decomposition_worked_case_against_least_squares() {
    let f = SymTensor::from_real(2, 2, &[2.0, 0.0, 0.0]).unwrap();
    let top = oracle_trace_free_part(&f);
    let parts = trace_free_decompose(&f).unwrap();
    assert!(rel_err(&parts[0], &top) < 1e-13);
    assert!((parts[1].components()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-13);
}

#[test]
fn decomposition_of_image_has_no_top_part() {
    let mut r = rng(23);
    for n in 2..=4 {
        for l in 2..=4 {
            let v = random_tensor(&mut r, n, l - 2);
            let parts = trace_free_decompose(&i_delta(&v)).unwrap();
            assert!(parts[0].max_abs() < 1e-12);
        }
    }
}

#[test]
fn uniqueness_of_decomposition() {
    let mut r = rng(29);
    for n in 2..=4 {
        for l in 0..=4 {
            for k in 0..=l / 2 {
                let w = projection_p(&random_tensor(&mut r, n, l - 2 * k));
                let parts = trace_free_decompose(&i_delta_pow(&w, k)).unwrap();
                assert_eq!(parts.len(), l / 2 + 1);
                for (j, b) in parts.iter().enumerate() {
                    if j == k {
                        assert!(rel_err(b, &w) < 1e-10, "n={n} l={l} k={k}");
                    } else {
                        assert!(b.max_abs() < 1e-10 * w.norm().max(1.0));
                    }
                }
            }
        }
    }
}

#[test]
fn solve_round_trip() {
    let mut r = rng(31);
    let g = random_tensor(&mut r, 3, 2);
    let u = jdelta_idelta_solve(&g).unwrap();
    assert!((&j_delta(&i_delta(&u)) - &g).max_abs() < 1e-12);
}

fn small_shape() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..=4, 0usize..=4, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_adjointness((n, m, seed) in small_shape()) {
        let mut r = rng(seed);
        let f = random_tensor(&mut r, n, m);
        let g = random_tensor(&mut r, n, m + 2);
        let lhs = i_delta(&f).inner(&g).unwrap();
        let rhs = f.inner(&j_delta(&g)).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn vector_adjointness((n, m, seed) in small_shape()) {
        let mut r = rng(seed);
        let f = random_tensor(&mut r, n, m);
        let g = random_tensor(&mut r, n, m + 1);
        let x = cvec(&random_unit_vector(&mut r, n));
        let lhs = i_vec(&f, &x).unwrap().inner(&g).unwrap();
        let rhs = f.inner(&j_vec(&g, &x).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn reassembly_and_orthogonality((n, l, seed) in small_shape()) {
        let mut r = rng(seed);
        let f = random_tensor(&mut r, n, l);
        let parts = trace_free_decompose(&f).unwrap();
        prop_assert!(rel_err(&trace_free_reassemble(&parts), &f) < 1e-10);
        for b in &parts {
            prop_assert!(j_delta(b).max_abs() < 1e-10 * f.norm().max(1.0) || b.rank() < 2);
        }
        let pieces: Vec<SymTensor> = parts.iter().enumerate().map(|(k, b)| i_delta_pow(b, k)).collect();
        for j in 0..pieces.len() {
            for k in j + 1..pieces.len() {
                let ip = pieces[j].inner(&pieces[k]).unwrap().norm();
                prop_assert!(ip <= 1e-10 * f.norm_sqr().max(1.0));
            }
        }
    }

    #[test]
    fn vector_contraction_identity((n, m, seed) in (1usize..=4, 0usize..=3, any::<u64>())) {
        let mut r = rng(seed);
        let f = random_tensor(&mut r, n, m);
        let xi: Vec<f64> = (0..n).map(|_| rand::Rng::gen_range(&mut r, -1.5..1.5)).collect();
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        let lhs = j_vec(&i_vec(&f, &xi).unwrap(), &xi).unwrap();
        let mut rhs = &f * (r2 / (m + 1) as f64);
        if m > 0 {
            let t = i_vec(&j_vec(&f, &xi).unwrap(), &xi).unwrap();
            rhs += &(&t * (m as f64 / (m + 1) as f64));
        }
        prop_assert!((&lhs - &rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn trace_free_contraction_identity((n, m, seed) in (2usize..=4, 1usize..=4, any::<u64>())) {
        let mut r = rng(seed);
        let f = projection_p(&random_tensor(&mut r, n, m));
        let xi = random_unit_vector(&mut r, n);
        let jf = j_vec(&f, &xi).unwrap();
        let lhs = jdelta_idelta_solve(&jf).unwrap();
        let c = (m * (m + 1)) as f64 / (2 * (n + 2 * m - 2)) as f64;
        prop_assert!((&lhs - &(&jf * c)).norm() <= 1e-11 * jf.norm().max(1.0));
    }
}
