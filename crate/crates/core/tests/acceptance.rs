//! Acceptance suite: one PASS/FAIL line per criterion, each run under a
//! wall-clock budget. Exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use symtomo_core::algebra::{
    determinant_check, directional_derivative, kernel_probe, random_smooth_field, translation_prediction,
};
use symtomo_core::decomposition::{
    helmholtz_trace_free, padded_derivative, symbol_identity_sides, symbol_operator, DEFAULT_TOLERANCE,
};
use symtomo_core::harness::{cutoff_gauge, gauge_experiment, moment_recovery_demo, Planted, RecoveryConfig};
use symtomo_core::mrt::rayset::fibonacci_rays;
use symtomo_core::mrt::{forward_ik, ray_scale, ColumnLayout};
use symtomo_core::symbolic::{
    dbar_apply, gauge_top_coefficient, particular_amplitude, polyanalytic_term, transport_apply, PolyDiffOp,
    Polynomial,
};
use symtomo_core::tensor::{
    i_delta, i_delta_pow, i_vec, j_delta, j_vec, jdelta_idelta_solve, projection_p, trace_free_decompose,
    trace_free_reassemble,
};
use symtomo_core::{GridDomain, SymTensor, TensorField};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn determinant_identity() -> Outcome {
    let mut rng = common::rng(2024);
    let mut worst: f64 = 0.0;
    for m in 1..=8 {
        for _ in 0..50 {
            let c: Vec<f64> = (0..=m)
                .map(|_| rng.gen_range(0.25..4.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
                .collect();
            let check = determinant_check(m, &c).map_err(|e| e.to_string())?;
            worst = worst.max(check.rel_error);
        }
    }
    ensure(worst < 1e-8, || format!("max relative error {worst:.3e}"))?;
    Ok(format!("max relative error {worst:.2e} over m = 1..8, 50 vectors each"))
}

fn tensor_algebra_suite() -> Outcome {
    let mut rng = common::rng(77);
    let mut worst: f64 = 0.0;
    let mut track = |v: f64| worst = worst.max(v);
    for n in 1..=4 {
        for m in 0..=4 {
            for _ in 0..100 {
                let f = common::random_tensor(&mut rng, n, m);
                let g2 = common::random_tensor(&mut rng, n, m + 2);
                let g1 = common::random_tensor(&mut rng, n, m + 1);
                let x = common::random_unit_vector(&mut rng, n);
                track(rel(i_delta(&f).inner(&g2).unwrap(), f.inner(&j_delta(&g2)).unwrap()));
                track(rel(i_vec(&f, &x).unwrap().inner(&g1).unwrap(), f.inner(&j_vec(&g1, &x).unwrap()).unwrap()));

                let parts = trace_free_decompose(&f).unwrap();
                track(common::rel_err(&trace_free_reassemble(&parts), &f));
                let scale = f.norm_sqr().max(1e-300);
                let pieces: Vec<SymTensor> = parts.iter().enumerate().map(|(k, b)| i_delta_pow(b, k)).collect();
                for (k, b) in parts.iter().enumerate() {
                    if b.rank() >= 2 {
                        track(j_delta(b).norm() / f.norm());
                    }
                    for other in &pieces[k + 1..] {
                        track(pieces[k].inner(other).unwrap().norm() / scale);
                    }
                }

                // Contraction with a vector, then the (j_δ i_δ)^{-1} identity on trace-free input.
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let lhs = j_vec(&i_vec(&f, &x).unwrap(), &x).unwrap();
                let mut rhs = &f * (r2 / (m + 1) as f64);
                if m > 0 {
                    rhs += &(&i_vec(&j_vec(&f, &x).unwrap(), &x).unwrap() * (m as f64 / (m + 1) as f64));
                }
                track(common::rel_err(&lhs, &rhs));

                if m >= 2 {
                    let p = projection_p(&f);
                    track(common::rel_err(&projection_p(&p), &p));
                    track(j_delta(&p).norm() / f.norm());
                    let v = common::random_tensor(&mut rng, n, m - 2);
                    track(projection_p(&i_delta(&v)).norm() / i_delta(&v).norm());
                    track(self_adjoint_gap(&f, &mut rng));
                    track(common::rel_err(&p, &common::oracle_trace_free_part(&f)));
                }
                if m >= 1 && n >= 2 {
                    let tf = projection_p(&f);
                    let jf = j_vec(&tf, &x).unwrap();
                    if jf.norm() > 1e-8 {
                        let c = (m * (m + 1)) as f64 / (2 * (n + 2 * m - 2)) as f64;
                        track(common::rel_err(&jdelta_idelta_solve(&jf).unwrap(), &(&jf * c)));
                    }
                }
            }
        }
    }
    ensure(worst < 1e-10, || format!("max relative error {worst:.3e}"))?;
    Ok(format!("max relative error {worst:.2e} over n <= 4, m <= 4, 100 instances each"))
}

/// `|⟨p f, g⟩ − ⟨f, p g⟩|` relative, for a fresh `g`.
fn self_adjoint_gap(f: &SymTensor, rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    let g = common::random_tensor(rng, f.dim(), f.rank());
    rel(projection_p(f).inner(&g).unwrap(), f.inner(&projection_p(&g)).unwrap())
}

fn mixed_smooth(dom: &GridDomain, m: usize, seed: u64) -> Vec<TensorField> {
    let mut rng = common::rng(seed);
    (0..=m).map(|p| random_smooth_field(dom, p, false, &mut rng)).collect()
}

fn translation_identity() -> Outcome {
    let dom = GridDomain::cube(2, 33, -1.0, 1.0).unwrap();
    let fields = mixed_smooth(&dom, 2, 21);
    let (mut worst, mut worst_high): (f64, f64) = (0.0, 0.0);
    for k in 0..=2 {
        for ray in fibonacci_rays(&dom, 20, k, 0.5, 100 + k as u64) {
            let scale = ray_scale(&fields, &ray).unwrap();
            for p in 0..=k + 1 {
                let d = directional_derivative(&fields, &ray, p, 0.1).unwrap();
                let predicted = translation_prediction(&fields, &ray, p).unwrap();
                if p > k {
                    worst_high = worst_high.max(d.norm() / scale);
                } else {
                    worst = worst.max((d - predicted).norm() / predicted.norm().max(1e-3 * scale));
                }
            }
        }
    }
    ensure(worst < 2e-2 && worst_high < 2e-2, || format!("p <= k error {worst:.3e}, p > k residual {worst_high:.3e}"))?;
    Ok(format!("p <= k relative error {worst:.2e}; p > k residual {worst_high:.2e} of data scale"))
}

fn order_raising() -> Outcome {
    let dom = GridDomain::cube(2, 25, -1.0, 1.0).unwrap();
    let mut rng = common::rng(8);
    let mut worst: f64 = 0.0;
    for m in 0..=2 {
        let f = random_smooth_field(&dom, m, false, &mut rng);
        let embed = |g: &TensorField| -> Vec<TensorField> {
            let mut out: Vec<TensorField> = (0..g.rank()).map(|r| TensorField::zeros(&dom, r)).collect();
            out.push(g.clone());
            out
        };
        let base = embed(&f);
        let rays = fibonacci_rays(&dom, 50, m, 0.6, 3);
        let mut raised = f.clone();
        for _ in 1..=2 {
            raised = raised.i_delta();
            let up = embed(&raised);
            for ray in &rays {
                let a = forward_ik(&base, ray).unwrap();
                let b = forward_ik(&up, ray).unwrap();
                worst = worst.max((a - b).norm() / ray_scale(&base, ray).unwrap().max(1e-300));
            }
        }
    }
    ensure(worst <= 1e-6, || format!("max deviation {worst:.3e} of ray scale"))?;
    Ok(format!("max deviation {worst:.2e} of ray scale over 50 rays"))
}

fn kernel_probe_criterion() -> Outcome {
    let dom = GridDomain::cube(2, 17, -1.0, 1.0).unwrap();
    let rays = fibonacci_rays(&dom, 200, 2, 0.9, 11);
    let r = kernel_probe(2, &dom, &rays, 5, 20, 3).map_err(|e| e.to_string())?;
    let floor = 1e-2;
    ensure(r.max_kernel_ratio() <= floor, || format!("kernel ratio {:.3e}", r.max_kernel_ratio()))?;
    ensure(r.min_random_ratio() >= 5.0 * floor, || format!("random ratio {:.3e}", r.min_random_ratio()))?;
    let mut sigmas = Vec::new();
    for m in 0..=1 {
        // enough rays for the matrix to be tall
        let unknowns = ColumnLayout::new(&dom, m).len();
        let rays = fibonacci_rays(&dom, 3 * unknowns, m, 0.9, 5);
        let s = kernel_probe(m, &dom, &rays, 0, 0, 0).map_err(|e| e.to_string())?.sigma_ratio.unwrap_or(0.0);
        ensure(s > 1e-6, || format!("m = {m}: sigma ratio {s:.3e}"))?;
        sigmas.push(s);
    }
    Ok(format!(
        "kernel ratio {:.2e}, random min {:.2e} ({:.0}x floor), sigma ratios m=0 {:.2e}, m=1 {:.2e}",
        r.max_kernel_ratio(),
        r.min_random_ratio(),
        r.min_random_ratio() / floor,
        sigmas[0],
        sigmas[1]
    ))
}

fn bump(dom: &GridDomain, center: &[f64], radius: f64) -> TensorField {
    TensorField::scalar_from_fn(dom, |x| {
        let s: f64 = x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>() / (radius * radius);
        Complex64::new(if s < 1.0 { (1.0 - s).powi(4) } else { 0.0 }, 0.0)
    })
}

/// Hessian of a bump plus a multiple of δ, with the bump as the expected potential.
fn smooth_input(points: usize) -> (TensorField, TensorField) {
    let dom = GridDomain::cube(2, points, -1.0, 1.0).unwrap();
    let (c, r) = ([0.1, -0.15], 0.7);
    let f = TensorField::from_fn(&dom, 2, |x| {
        let y = [x[0] - c[0], x[1] - c[1]];
        let s = (y[0] * y[0] + y[1] * y[1]) / (r * r);
        let w = {
            let t: f64 = ((x[0] + 0.2).powi(2) + (x[1] - 0.1).powi(2)) / 0.36;
            if t < 1.0 { (1.0 - t).powi(4) } else { 0.0 }
        };
        let mut h = [[0.0; 2]; 2];
        if s < 1.0 {
            let u = 1.0 - s;
            for i in 0..2 {
                for j in 0..2 {
                    let d = if i == j { 1.0 } else { 0.0 };
                    h[i][j] = -8.0 * d * u.powi(3) / (r * r) + 48.0 * y[i] * y[j] * u * u / r.powi(4);
                }
            }
        }
        SymTensor::from_real(2, 2, &[h[0][0] + w, h[0][1], h[1][1] + w]).unwrap()
    })
    .unwrap();
    (f, bump(&dom, &c, r))
}

fn helmholtz_criterion() -> Outcome {
    let dom = GridDomain::cube(2, 17, -1.0, 1.0).unwrap();
    // exact forms
    let mut phi = bump(&dom, &[0.1, -0.1], 0.6);
    phi.zero_margin(2);
    let f = padded_derivative(&phi, 2).map_err(|e| e.to_string())?;
    let out = helmholtz_trace_free(&f, 1e-12).map_err(|e| e.to_string())?;
    let exact_phi = (&out.phi - &phi).norm_l2() / phi.norm_l2();
    let mut w = bump(&dom, &[-0.1, 0.2], 0.6);
    w.zero_margin(2);
    let g = w.i_delta();
    let out_v = helmholtz_trace_free(&g, 1e-12).map_err(|e| e.to_string())?;
    let exact_v = (out_v.v.as_ref().unwrap() - &w).norm_l2() / w.norm_l2() + out_v.f_tilde.norm_l2() / g.norm_l2();
    ensure(exact_phi <= 1e-6 && exact_v <= 1e-6, || format!("exact forms: phi {exact_phi:.3e}, v {exact_v:.3e}"))?;

    let mut rng = common::rng(7);
    let mut f = random_smooth_field(&dom, 2, false, &mut rng);
    f.zero_margin(2);
    let out = helmholtz_trace_free(&f, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
    ensure(out.reassembly_error <= 1e-3, || format!("reassembly {:.3e}", out.reassembly_error))?;
    ensure(out.trace_residual <= 1e-10, || format!("trace {:.3e}", out.trace_residual))?;
    ensure(out.divergence_residual <= 1e-2, || format!("divergence {:.3e}", out.divergence_residual))?;

    let mut errs = Vec::new();
    for points in [17, 33] {
        let (f, phi) = smooth_input(points);
        let out = helmholtz_trace_free(&f, 1e-10).map_err(|e| e.to_string())?;
        errs.push(((&out.phi - &phi).norm_l2() / phi.norm_l2(), out.f_tilde.norm_l2() / f.norm_l2()));
    }
    let order_phi = (errs[0].0 / errs[1].0).log2();
    let order_tilde = (errs[0].1 / errs[1].1).log2();
    ensure(order_phi >= 1.5 && order_tilde >= 1.5, || format!("orders phi {order_phi:.2}, f_tilde {order_tilde:.2}"))?;
    Ok(format!(
        "exact forms {exact_phi:.1e}/{exact_v:.1e}; reassembly {:.1e}, trace {:.1e}, divergence {:.1e}; orders {order_phi:.2}/{order_tilde:.2}",
        out.reassembly_error, out.trace_residual, out.divergence_residual
    ))
}

fn symbol_positivity() -> Outcome {
    let mut rng = common::rng(3);
    let mut margin = f64::INFINITY;
    let mut worst_identity: f64 = 0.0;
    for n in 2..=4 {
        for m in 1..=3 {
            for _ in 0..100 {
                let xi = common::random_unit_vector(&mut rng, n);
                margin = margin.min(symbol_operator(&xi, m).map_err(|e| e.to_string())?);
                let mut acc = SymTensor::scalar(n, 1.0);
                for _ in 0..m {
                    let f = projection_p(&acc);
                    let (lhs, rhs) = symbol_identity_sides(&f, &xi).map_err(|e| e.to_string())?;
                    worst_identity = worst_identity.max((lhs - rhs).abs() / rhs.abs().max(1.0));
                    acc = i_vec(&f, &xi).unwrap();
                }
            }
        }
    }
    ensure(margin > 0.0, || format!("minimum Rayleigh value {margin:.3e}"))?;
    ensure(worst_identity <= 1e-12, || format!("identity error {worst_identity:.3e}"))?;
    Ok(format!("minimum Rayleigh value {margin:.4}; identity error {worst_identity:.1e}"))
}

fn gauge_identity() -> Outcome {
    let dom = GridDomain::cube(2, 25, -1.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for m in 2..=3 {
        for r in ["1", "x1 - 2*x2 + 1/2", "x1*x2 + x2^2"] {
            let phi = cutoff_gauge(&Polynomial::parse(r, 2).unwrap(), m);
            let rep = gauge_experiment(m, &phi, &dom, 20, 6).map_err(|e| e.to_string())?;
            ensure(rep.top_exact, || format!("m = {m}, r = {r}: top coefficient not exact"))?;
            ensure(rep.identity_pairs == 400, || format!("only {} pairs", rep.identity_pairs))?;
            ensure(rep.identity_passed, || format!("m = {m}, r = {r}: identity {:.3e}", rep.identity_max_relative))?;
            ensure(rep.constant_phi_trivial, || "constant weight changed the operator".into())?;
            worst = worst.max(rep.identity_max_relative / rep.identity_tolerance);
        }
    }
    // the worked m = 2 example, compared with 4 i_δ(∇φ) written out by hand
    let phi = Polynomial::parse("x1^2*x2^2*(1 - x1^2)^2*(1 - x2^2)^2", 2).unwrap();
    let top = PolyDiffOp::polyharmonic(2, 2).conjugate_exp_truncated(&phi, 3).map_err(|e| e.to_string())?;
    let want = common::four_i_delta_gradient(&phi);
    ensure(top.coefficient_polys(3) == want, || "worked example: a3 != 4 i_delta(grad phi)".into())?;
    ensure(gauge_top_coefficient(&phi, 2).unwrap() == want, || "closed form disagrees".into())?;
    Ok(format!("exact top coefficients; identity at {worst:.2} of tolerance; worked example exact"))
}

fn polyanalytic_transport() -> Outcome {
    let n = 3;
    let mut checks = 0;
    for seed in 0..50 {
        let mut rng = common::rng(500 + seed);
        let f = common::random_poly(&mut rng, 1, 4, 4);
        let y3 = Polynomial::var(n, 2);
        let g = common::random_poly(&mut rng, n, 3, 3).substitute(&[y3.clone(), y3.clone(), y3]).unwrap();
        for m in 1..=4usize {
            let tm = common::transport_power(n, m);
            for k in 0..m as u32 {
                let a = particular_amplitude(k, &f, &g).map_err(|e| e.to_string())?;
                ensure(transport_apply(&a, m).unwrap().is_zero() && tm.apply(&a).unwrap().is_zero(), || {
                    format!("seed {seed}: T^{m} misses y2^{k} f(z) g")
                })?;
                let fk = common::random_poly(&mut rng, 1, 3, 3);
                let b = polyanalytic_term(k, &fk, 2).map_err(|e| e.to_string())?;
                ensure(dbar_apply(&b, m).unwrap().is_zero(), || format!("seed {seed}: dbar^{m} misses (z - zbar)^{k} f"))?;
                checks += 2;
            }
        }
    }
    Ok(format!("{checks} exact annihilation checks"))
}

fn moment_recovery() -> Outcome {
    let cfg = RecoveryConfig::default();
    let bump = moment_recovery_demo(Planted::TraceFreeBump, &cfg).map_err(|e| e.to_string())?;
    let gauge = moment_recovery_demo(Planted::PureGauge, &cfg).map_err(|e| e.to_string())?;
    let err = bump.slice_error.unwrap_or(f64::INFINITY);
    let ratio = gauge.recovered_norm / bump.recovered_norm;
    ensure(err <= 0.15, || format!("bump slice error {err:.3}"))?;
    ensure(ratio <= 0.02, || format!("gauge response {ratio:.3e} of bump"))?;
    Ok(format!(
        "bump slice error {:.1}% ({} CGLS iterations, condition ~{:.0}); gauge response {:.2e} of bump",
        100.0 * err,
        bump.iterations,
        bump.condition_estimate,
        ratio
    ))
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { name: "determinant identity", budget: secs(1), run: determinant_identity },
        Criterion { name: "tensor algebra suite", budget: secs(10), run: tensor_algebra_suite },
        Criterion { name: "translation identity", budget: secs(30), run: translation_identity },
        Criterion { name: "order-raising invariance", budget: secs(30), run: order_raising },
        Criterion { name: "kernel probe", budget: secs(300), run: kernel_probe_criterion },
        Criterion { name: "Helmholtz trace-free decomposition", budget: secs(120), run: helmholtz_criterion },
        Criterion { name: "symbol positivity", budget: secs(5), run: symbol_positivity },
        Criterion { name: "gauge identity", budget: secs(60), run: gauge_identity },
        Criterion { name: "poly-analytic transport", budget: secs(5), run: polyanalytic_transport },
        Criterion { name: "moment-recovery demo", budget: secs(600), run: moment_recovery },
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run));
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(Ok(d)) if elapsed <= c.budget => (true, d),
            Ok(Ok(d)) => (false, format!("{d}; over the {}s budget", c.budget.as_secs())),
            Ok(Err(e)) => (false, e),
            Err(p) => {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                (false, format!("panicked: {msg}"))
            }
        };
        if !passed {
            failures += 1;
        }
        println!(
            "[{}] {:>2} {} ({:.2}s): {}",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            c.name,
            elapsed.as_secs_f64(),
            detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
