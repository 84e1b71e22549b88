mod common;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use symtomo_core::harness::{cutoff_gauge, gauge_experiment};
use symtomo_core::symbolic::*;
use symtomo_core::GridDomain;

fn random_op(rng: &mut ChaCha8Rng, n: usize, order: u32) -> PolyDiffOp {
    let mut op = PolyDiffOp::zero(n);
    for _ in 0..3 {
        let mut term = PolyDiffOp::multiplication(&common::random_poly(rng, n, 2, 3));
        for _ in 0..rng.gen_range(0..=order) {
            term = term.compose(&PolyDiffOp::partial(n, rng.gen_range(0..n))).unwrap();
        }
        op = op.add(&term);
    }
    op
}

#[test]
fn conjugation_is_multiplicative() {
    let mut rng = common::rng(12);
    for _ in 0..10 {
        let (p, q) = (random_op(&mut rng, 2, 2), random_op(&mut rng, 2, 2));
        let phi = common::random_poly(&mut rng, 2, 2, 3);
        let lhs = p.compose(&q).unwrap().conjugate_exp(&phi).unwrap();
        let rhs = p.conjugate_exp(&phi).unwrap().compose(&q.conjugate_exp(&phi).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn conjugation_preserves_top_order_part() {
    let mut rng = common::rng(13);
    for m in 1..=3 {
        let p = PolyDiffOp::polyharmonic(3, m);
        let phi = common::random_poly(&mut rng, 3, 3, 4);
        let c = p.conjugate_exp(&phi).unwrap();
        assert_eq!(c.order(), 2 * m);
        assert_eq!(c.coefficient_polys(2 * m), p.coefficient_polys(2 * m));
    }
}

#[test]
fn constant_weight_changes_nothing() {
    let c = Polynomial::constant(2, rational(-5, 3));
    for m in 1..=3 {
        let p = PolyDiffOp::polyharmonic(2, m);
        assert_eq!(p.conjugate_exp(&c).unwrap(), p);
        assert!(p.commutator(&c).unwrap().is_zero());
    }
}

#[test]
fn conjugated_first_order_operator_matches_hand_expansion() {
    // e^{-φ} ∂_1 e^{φ} u = ∂_1 u + (∂_1 φ) u, applied to a concrete u
    let phi = Polynomial::parse("x1^2*x2 + 3*x2", 2).unwrap();
    let u = Polynomial::parse("x1*x2^2 - 2", 2).unwrap();
    let op = PolyDiffOp::partial(2, 0).conjugate_exp(&phi).unwrap();
    let want = &u.derivative(0) + &(&phi.derivative(0) * &u);
    assert_eq!(op.apply(&u).unwrap(), want);
}

#[test]
fn top_gauge_coefficient_for_the_worked_example() {
    let phi = Polynomial::parse("x1^2*x2^2", 2).unwrap();
    let cutoff = Polynomial::parse("(1 - x1^2)^2*(1 - x2^2)^2", 2).unwrap();
    for phi in [phi.clone(), &phi * &cutoff] {
        let top = PolyDiffOp::polyharmonic(2, 2).conjugate_exp_truncated(&phi, 3).unwrap();
        let want = common::four_i_delta_gradient(&phi);
        assert_eq!(top.coefficient_polys(3), want);
        assert_eq!(gauge_top_coefficient(&phi, 2).unwrap(), want);
        // spot values
        for x in [[0.3, -0.7], [0.9, 0.1], [-0.5, 0.5]] {
            let a = top.coefficient_tensor(3, &x).unwrap();
            let b = eval_components(&want, 2, 3, &x).unwrap();
            assert!((&a - &b).max_abs() < 1e-12);
        }
    }
}

#[test]
fn top_gauge_coefficient_in_three_dimensions() {
    let mut rng = common::rng(4);
    for m in 2..=3 {
        let phi = common::random_poly(&mut rng, 3, 3, 5);
        let conj = PolyDiffOp::polyharmonic(3, m).conjugate_exp_truncated(&phi, 2 * m - 1).unwrap();
        let lin = PolyDiffOp::polyharmonic(3, m).commutator(&phi).unwrap();
        let want = gauge_top_coefficient(&phi, m).unwrap();
        assert_eq!(conj.coefficient_polys(2 * m - 1), want);
        assert_eq!(lin.coefficient_polys(2 * m - 1), want);
    }
}

#[test]
fn polyanalytic_amplitudes_over_seeds() {
    let n = 3;
    for seed in 0..50 {
        let mut rng = common::rng(1000 + seed);
        let f = common::random_poly(&mut rng, 1, 4, 4);
        let g = common::random_poly(&mut rng, n, 3, 3).substitute(&[
            Polynomial::var(n, 2),
            Polynomial::var(n, 2),
            Polynomial::var(n, 2),
        ]).unwrap();
        for m in 1..=4usize {
            let tm = common::transport_power(n, m);
            for k in 0..m as u32 {
                let a = particular_amplitude(k, &f, &g).unwrap();
                assert!(tm.apply(&a).unwrap().is_zero(), "seed {seed}, m {m}, k {k}");
                assert!(transport_apply(&a, m).unwrap().is_zero());
                let fk = common::random_poly(&mut rng, 1, 3, 3);
                let b = polyanalytic_term(k, &fk, 2).unwrap();
                assert!(dbar_apply(&b, m).unwrap().is_zero(), "seed {seed}, m {m}, k {k}");
            }
        }
    }
}

#[test]
fn transport_detects_too_high_powers() {
    let f = Polynomial::parse("x1 + 2", 1).unwrap();
    let g = Polynomial::one(3);
    let a = particular_amplitude(2, &f, &g).unwrap();
    assert!(!transport_apply(&a, 2).unwrap().is_zero());
    assert!(transport_apply(&a, 3).unwrap().is_zero());
    assert!(particular_amplitude(1, &f, &Polynomial::var(3, 0)).is_err());
}

#[test]
fn polyharmonic_basis_members_are_annihilated() {
    for (m, n, deg) in [(2, 2, 6), (3, 2, 7), (2, 3, 5)] {
        let op = PolyDiffOp::polyharmonic(n, m);
        let basis = polyharmonic_basis(m, deg, n).unwrap();
        assert!(basis.len() >= 20, "m {m}, n {n}: {}", basis.len());
        for u in &basis {
            assert!(op.apply(u).unwrap().is_zero());
        }
    }
}

/// Exact check that `∂_j^r φ` vanishes on the faces `x_j = ±1`, `r ≤ order`.
fn normal_jets_vanish(phi: &Polynomial, order: usize) -> bool {
    let n = phi.dim();
    (0..n).all(|j| {
        (0..=order).all(|r| {
            let mut alpha = vec![0u32; n];
            alpha[j] = r as u32;
            let d = phi.partial(&alpha);
            [-1, 1].iter().all(|&side| {
                let subs: Vec<Polynomial> = (0..n)
                    .map(|a| if a == j { Polynomial::constant(n, integer(side)) } else { Polynomial::var(n, a) })
                    .collect();
                d.substitute(&subs).unwrap().is_zero()
            })
        })
    })
}

#[test]
fn gauge_identity_for_three_weights() {
    let dom = GridDomain::cube(2, 25, -1.0, 1.0).unwrap();
    for m in 2..=3 {
        for r in ["1", "x1 - 2*x2 + 1/2", "x1*x2 + x2^2"] {
            let phi = cutoff_gauge(&Polynomial::parse(r, 2).unwrap(), m);
            let rep = gauge_experiment(m, &phi, &dom, 20, 6).unwrap();
            assert!(rep.top_exact, "m {m}, {r}");
            // float evaluation of the expanded cutoff loses a few digits
            assert!(rep.top_max_deviation < 1e-7, "m {m}, {r}: {}", rep.top_max_deviation);
            assert_eq!(rep.identity_pairs, 400);
            assert!(rep.identity_passed, "m {m}, {r}: {}", rep.identity_max_relative);
            assert!(rep.constant_phi_trivial);
            assert!(normal_jets_vanish(&phi, 2 * m - 1));
        }
    }
}
