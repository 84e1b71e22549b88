use num_complex::Complex64;

use super::diffop::PolyDiffOp;
use super::poly::{from_f64, imaginary_unit, integer, rational, Polynomial};
use crate::error::{check_dim, Error, Result};
use crate::field::{GridDomain, TensorField};
use crate::mrt::orthonormal_completion;
use crate::tensor::{i_vec, SymTensor};

/// Semiclassical parameter and the adapted frame `{e_1, η, …}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CgoParams {
    pub h: f64,
    pub eta: Vec<f64>,
    /// Rows are the frame vectors; `y_j = frame[j]·x`.
    pub frame: Vec<Vec<f64>>,
}

impl CgoParams {
    pub fn new(h: f64, eta: Vec<f64>) -> Result<Self> {
        let n = eta.len();
        if n < 2 {
            return Err(Error::Unsupported("CGO frames need n >= 2".into()));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::invalid(format!("h must be positive, got {h}")));
        }
        let norm = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 || eta[0].abs() > 1e-12 {
            return Err(Error::invalid("eta must be a unit vector orthogonal to e_1"));
        }
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        let mut frame = vec![e1.clone(), eta.clone()];
        frame.extend(orthonormal_completion(n, &[e1, eta.clone()]));
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = frame[a].iter().zip(&frame[b]).map(|(x, y)| x * y).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                if (dot - expect).abs() > 1e-12 {
                    return Err(Error::invalid("frame is not orthonormal"));
                }
            }
        }
        Ok(Self { h, eta, frame })
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    /// `ζ = e_1 + iη`.
    pub fn zeta(&self) -> Vec<Complex64> {
        (0..self.dim())
            .map(|a| Complex64::new(if a == 0 { 1.0 } else { 0.0 }, self.eta[a]))
            .collect()
    }

    pub fn to_frame(&self, x: &[f64]) -> Vec<f64> {
        self.frame.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Rewrites a polynomial in frame coordinates `y` as one in `x`.
    pub fn to_x_coordinates(&self, a: &Polynomial) -> Result<Polynomial> {
        check_dim(self.dim(), a.dim())?;
        let subs: Vec<Polynomial> = self
            .frame
            .iter()
            .map(|row| Polynomial::linear(&row.iter().map(|&v| from_f64(v)).collect::<Vec<_>>()))
            .collect();
        a.substitute(&subs)
    }
}

fn check_plane(a: &Polynomial) -> Result<()> {
    if a.dim() < 2 {
        return Err(Error::Unsupported("the transport operator needs n >= 2".into()));
    }
    Ok(())
}

fn dbar_step(a: &Polynomial) -> Polynomial {
    &a.derivative(0) + &a.derivative(1).scale(&imaginary_unit())
}

/// `T^p a` with `T = 2(∂_{y1} + i∂_{y2})`, `a` in frame coordinates.
pub fn transport_apply(a: &Polynomial, p: usize) -> Result<Polynomial> {
    check_plane(a)?;
    let mut acc = a.clone();
    for _ in 0..p {
        acc = dbar_step(&acc).scale(&integer(2));
    }
    Ok(acc)
}

/// `∂_z̄^p a` with `z = y1 + i y2`.
pub fn dbar_apply(a: &Polynomial, p: usize) -> Result<Polynomial> {
    check_plane(a)?;
    let mut acc = a.clone();
    for _ in 0..p {
        acc = dbar_step(&acc).scale(&rational(1, 2));
    }
    Ok(acc)
}

/// `z = y1 + i y2` in `n` frame variables.
pub fn z_coordinate(n: usize) -> Polynomial {
    &Polynomial::var(n, 0) + &Polynomial::var(n, 1).scale(&imaginary_unit())
}

/// `f(z)` for a univariate polynomial `f`.
pub fn holomorphic(f: &Polynomial, n: usize) -> Result<Polynomial> {
    check_dim(1, f.dim())?;
    f.substitute(&[z_coordinate(n)])
}

/// `y2^k f(z) g(y'')`; `g` may not involve `y1` or `y2`.
pub fn particular_amplitude(k: u32, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    let n = g.dim();
    check_plane(g)?;
    if !g.independent_of(0) || !g.independent_of(1) {
        return Err(Error::invalid("the transverse factor must depend on y3..yn only"));
    }
    Ok(&(&Polynomial::var(n, 1).pow(k) * &holomorphic(f, n)?) * g)
}

/// `(z − z̄)^k f(z)`.
pub fn polyanalytic_term(k: u32, f: &Polynomial, n: usize) -> Result<Polynomial> {
    let z = z_coordinate(n);
    let diff = &z - &z.conj();
    Ok(&diff.pow(k) * &holomorphic(f, n)?)
}

fn phase(zeta: &[Complex64], x: &[f64], h: f64) -> Complex64 {
    let s: Complex64 = zeta.iter().zip(x).map(|(z, v)| z * v).sum();
    (s / h).exp()
}

/// Samples `u = e^{ζ·x/h} a_0` and `v = e^{−ζ·x/h} b_0`; both amplitudes
/// are in frame coordinates and must satisfy `T^m a = 0`.
pub fn cgo_pair(
    params: &CgoParams,
    m: usize,
    a0: &Polynomial,
    b0: &Polynomial,
    domain: &GridDomain,
) -> Result<(TensorField, TensorField)> {
    check_dim(params.dim(), domain.dim())?;
    for (name, a) in [("a0", a0), ("b0", b0)] {
        check_dim(params.dim(), a.dim())?;
        if !transport_apply(a, m)?.is_zero() {
            return Err(Error::invalid(format!("{name} is not annihilated by T^{m}")));
        }
    }
    let zeta = params.zeta();
    let (ca, cb) = (a0.compile(), b0.compile());
    let u = TensorField::scalar_from_fn(domain, |x| phase(&zeta, x, params.h) * ca.eval(&params.to_frame(x)));
    let v = TensorField::scalar_from_fn(domain, |x| cb.eval(&params.to_frame(x)) / phase(&zeta, x, params.h));
    Ok((u, v))
}

/// Exact jets `∂^{⊗l} u`, `l = 0..=max_order`, of `u = e^{ζ·x/h} a_0`.
pub fn cgo_jets(params: &CgoParams, a0: &Polynomial, max_order: usize, domain: &GridDomain) -> Result<Vec<TensorField>> {
    let n = params.dim();
    check_dim(n, domain.dim())?;
    let ax = params.to_x_coordinates(a0)?;
    // derivative tensors of the amplitude, order by order
    let amp: Vec<Vec<super::poly::CompiledPoly>> = (0..=max_order)
        .map(|k| {
            crate::tensor::layout(n, k)
                .iter()
                .map(|(_, labels)| {
                    let mut alpha = vec![0u32; n];
                    for &a in labels {
                        alpha[a as usize] += 1;
                    }
                    ax.partial(&alpha).compile()
                })
                .collect()
        })
        .collect();
    let zeta_h: Vec<Complex64> = params.zeta().iter().map(|z| z / params.h).collect();
    let mut out: Vec<TensorField> = (0..=max_order).map(|l| TensorField::zeros(domain, l)).collect();
    for p in 0..domain.len() {
        let x = domain.coord(p);
        let ph = phase(&params.zeta(), &x, params.h);
        let derivs: Vec<SymTensor> = amp
            .iter()
            .enumerate()
            .map(|(k, comps)| SymTensor::new(n, k, comps.iter().map(|c| c.eval(&x)).collect()).expect("layout sized"))
            .collect();
        for (l, field) in out.iter_mut().enumerate() {
            let mut acc = SymTensor::zeros(n, l);
            for j in 0..=l {
                let mut t = derivs[l - j].clone();
                for _ in 0..j {
                    t = i_vec(&t, &zeta_h)?;
                }
                acc += &t.scale(crate::tensor::binomial(l, j) as f64);
            }
            field.set_at(p, &acc.scale(ph));
        }
    }
    Ok(out)
}

/// The operator `e^{−ζ·x/h}(−Δ)^m e^{ζ·x/h}` with exact rational `ζ/h`.
pub fn conjugated_polyharmonic(n: usize, m: usize, zeta_over_h: &[(i64, i64)]) -> Result<PolyDiffOp> {
    check_dim(n, zeta_over_h.len())?;
    let coeffs: Vec<_> = zeta_over_h.iter().map(|&(re, im)| integer(re) + integer(im) * imaginary_unit()).collect();
    PolyDiffOp::polyharmonic(n, m).conjugate_exp(&Polynomial::linear(&coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::poly::Polynomial as P;

    #[test]
    fn transport_of_linear_amplitude() {
        let y2 = P::var(3, 1);
        let t = transport_apply(&y2, 1).unwrap();
        assert_eq!(t, P::constant(3, integer(2) * imaginary_unit()));
        assert!(transport_apply(&y2, 2).unwrap().is_zero());
    }

    #[test]
    fn zeta_is_isotropic_and_phases_cancel() {
        let p = CgoParams::new(0.3, vec![0.0, 0.6, 0.8]).unwrap();
        let z = p.zeta();
        let zz: Complex64 = z.iter().map(|v| v * v).sum();
        assert!(zz.norm() < 1e-15);
        let dom = GridDomain::cube(3, 5, -1.0, 1.0).unwrap();
        let one = P::one(3);
        let (u, v) = cgo_pair(&p, 2, &one, &one, &dom).unwrap();
        for q in 0..dom.len() {
            assert!((u.values()[q] * v.values()[q] - 1.0).norm() < 1e-12);
        }
        assert!(cgo_pair(&p, 1, &P::var(3, 1), &one, &dom).is_err());
        assert!(CgoParams::new(0.3, vec![0.1, 0.0, 1.0]).is_err());
    }

    #[test]
    fn conjugated_bilaplacian_kills_linear_amplitude() {
        // ζ/h = 2(e1 + i e2)
        let op = conjugated_polyharmonic(2, 2, &[(2, 0), (0, 2)]).unwrap();
        assert!(op.apply(&P::var(2, 1)).unwrap().is_zero());
        assert!(!op.apply(&P::parse("x2^2", 2).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn jets_match_finite_differences_at_order_one() {
        let p = CgoParams::new(0.7, vec![0.0, 1.0]).unwrap();
        let dom = GridDomain::cube(2, 41, -1.0, 1.0).unwrap();
        let a0 = P::parse("x2^2 + x1*x2", 2).unwrap();
        let jets = cgo_jets(&p, &a0, 1, &dom).unwrap();
        let ax = p.to_x_coordinates(&a0).unwrap().compile();
        let zeta = p.zeta();
        let x = [0.3, -0.2];
        let q = dom.flat_index(&[26, 16]);
        let xq = dom.coord(q);
        assert!((xq[0] - x[0]).abs() < 1e-12 && (xq[1] - x[1]).abs() < 1e-12);
        let e = 1e-5;
        for a in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[a] += e;
            xm[a] -= e;
            let u = |y: &[f64]| phase(&zeta, y, p.h) * ax.eval(y);
            let fd = (u(&xp) - u(&xm)) / (2.0 * e);
            assert!((jets[1].component(a)[q] - fd).norm() < 1e-6 * fd.norm().max(1.0));
        }
    }

    #[test]
    fn polyanalytic_terms_are_annihilated() {
        let f = P::parse("x1^3 - 2*x1 + (1+i)", 1).unwrap();
        for m in 1..=3u32 {
            for k in 0..m {
                let a = polyanalytic_term(k, &f, 2).unwrap();
                assert!(dbar_apply(&a, m as usize).unwrap().is_zero());
            }
            assert!(!dbar_apply(&polyanalytic_term(m, &f, 2).unwrap(), m as usize).unwrap().is_zero());
        }
    }
}
