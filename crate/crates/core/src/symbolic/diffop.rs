use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use super::poly::{integer, Polynomial, Scalar};
use crate::error::{Error, Result};
use crate::tensor::{binomial, factorial, plan, SymTensor};

/// Largest total order a composition may produce.
pub const MAX_OPERATOR_ORDER: usize = 24;

/// `Σ_α c_α(x) ∂^α` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyDiffOp {
    n: usize,
    terms: BTreeMap<Vec<u32>, Polynomial>,
}

fn order_of(alpha: &[u32]) -> usize {
    alpha.iter().sum::<u32>() as usize
}

impl PolyDiffOp {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::multiplication(&Polynomial::one(n))
    }

    /// Multiplication by `p`.
    pub fn multiplication(p: &Polynomial) -> Self {
        let mut op = Self::zero(p.dim());
        op.add_term(vec![0; p.dim()], p.clone());
        op
    }

    /// `∂_j` (0-based `j`).
    pub fn partial(n: usize, j: usize) -> Self {
        let mut alpha = vec![0; n];
        alpha[j] = 1;
        let mut op = Self::zero(n);
        op.add_term(alpha, Polynomial::one(n));
        op
    }

    pub fn laplacian(n: usize) -> Self {
        let mut op = Self::zero(n);
        for j in 0..n {
            let mut alpha = vec![0; n];
            alpha[j] = 2;
            op.add_term(alpha, Polynomial::one(n));
        }
        op
    }

    /// `(−Δ)^m`, expanded by the multinomial theorem.
    pub fn polyharmonic(n: usize, m: usize) -> Self {
        let mut op = Self::zero(n);
        let sign = if m % 2 == 0 { 1 } else { -1 };
        for beta in compositions(m as u32, n) {
            let mult = factorial(m) / beta.iter().map(|&b| factorial(b as usize)).product::<u64>();
            let alpha: Vec<u32> = beta.iter().map(|b| 2 * b).collect();
            op.add_term(alpha, Polynomial::constant(n, integer(sign * mult as i64)));
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Polynomial)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &[u32]) -> Polynomial {
        self.terms.get(alpha).cloned().unwrap_or_else(|| Polynomial::zero(self.n))
    }

    pub fn order(&self) -> usize {
        self.terms.keys().map(|a| order_of(a)).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, alpha: Vec<u32>, c: Polynomial) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&alpha) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(alpha, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&integer(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zero(self.n);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c.scale(s));
        }
        out
    }

    /// Left multiplication `p·P`.
    pub fn left_multiply(&self, p: &Polynomial) -> Self {
        let mut out = Self::zero(self.n);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c * p);
        }
        out
    }

    /// Exact application to a polynomial.
    pub fn apply(&self, u: &Polynomial) -> Result<Polynomial> {
        if u.dim() != self.n {
            return Err(Error::DimMismatch { expected: self.n, got: u.dim() });
        }
        let mut out = Polynomial::zero(self.n);
        for (a, c) in &self.terms {
            let d = u.partial(a);
            if !d.is_zero() {
                out = &out + &(c * &d);
            }
        }
        Ok(out)
    }

    /// `self ∘ other` by the Leibniz rule.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.compose_truncated(other, 0)
    }

    /// `self ∘ other`, dropping every term of order below `min_order`.
    pub fn compose_truncated(&self, other: &Self, min_order: usize) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimMismatch { expected: self.n, got: other.n });
        }
        if self.order() + other.order() > MAX_OPERATOR_ORDER {
            return Err(Error::SizeGuard(format!(
                "composition order {} exceeds {MAX_OPERATOR_ORDER}",
                self.order() + other.order()
            )));
        }
        let mut out = Self::zero(self.n);
        for (alpha, c) in &self.terms {
            for (beta, d) in &other.terms {
                if order_of(alpha) + order_of(beta) < min_order {
                    continue;
                }
                // ∂^α (d ∂^β) = Σ_{γ ≤ α} C(α,γ) (∂^γ d) ∂^{α−γ+β}
                for gamma in sub_indices(alpha) {
                    let rest = order_of(alpha) - order_of(&gamma) + order_of(beta);
                    if rest < min_order {
                        continue;
                    }
                    let dg = d.partial(&gamma);
                    if dg.is_zero() {
                        continue;
                    }
                    let weight: u64 = alpha.iter().zip(&gamma).map(|(&a, &g)| binomial(a as usize, g as usize)).product();
                    let target: Vec<u32> =
                        alpha.iter().zip(&gamma).zip(beta).map(|((a, g), b)| a - g + b).collect();
                    out.add_term(target, (c * &dg).scale(&integer(weight as i64)));
                }
            }
        }
        Ok(out)
    }

    /// `e^{−φ} P e^{φ}`: every `∂_j` becomes `∂_j + ∂_jφ`.
    pub fn conjugate_exp(&self, phi: &Polynomial) -> Result<Self> {
        self.conjugate_exp_truncated(phi, 0)
    }

    /// [`Self::conjugate_exp`] keeping only terms of order `≥ min_order`.
    pub fn conjugate_exp_truncated(&self, phi: &Polynomial, min_order: usize) -> Result<Self> {
        if phi.dim() != self.n {
            return Err(Error::DimMismatch { expected: self.n, got: phi.dim() });
        }
        let shifted: Vec<Self> = (0..self.n)
            .map(|j| Self::partial(self.n, j).add(&Self::multiplication(&phi.derivative(j))))
            .collect();
        let mut out = Self::zero(self.n);
        for (alpha, c) in &self.terms {
            let total = order_of(alpha);
            if total < min_order {
                continue;
            }
            let mut acc = Self::identity(self.n);
            let mut used = 0;
            for (j, &k) in alpha.iter().enumerate() {
                for _ in 0..k {
                    used += 1;
                    // later factors raise the order by at most one each
                    let keep = min_order.saturating_sub(total - used);
                    acc = acc.compose_truncated(&shifted[j], keep)?;
                }
            }
            out = out.add(&acc.left_multiply(c));
        }
        Ok(out)
    }

    /// `[P, φ] = P∘φ − φ∘P`, the first-order change of `e^{−εφ}Pe^{εφ}`.
    pub fn commutator(&self, phi: &Polynomial) -> Result<Self> {
        let m = Self::multiplication(phi);
        Ok(self.compose(&m)?.sub(&self.left_multiply(phi)))
    }

    /// Compressed coefficient tensor of order `l` as polynomials: entry
    /// `idx` is `c_α / mult(α)` so that `Σ_idx a_idx ∂^idx` reproduces the
    /// order-`l` part.
    pub fn coefficient_polys(&self, l: usize) -> Vec<Polynomial> {
        let lay = plan::layout(self.n, l);
        lay.iter()
            .map(|(pos, labels)| {
                let mut alpha = vec![0u32; self.n];
                for &a in labels {
                    alpha[a as usize] += 1;
                }
                let mult = lay.multiplicity(pos) as i64;
                self.coefficient(&alpha).scale(&super::poly::rational(1, mult))
            })
            .collect()
    }

    /// Order-`l` coefficient tensor evaluated at `x`.
    pub fn coefficient_tensor(&self, l: usize, x: &[f64]) -> Result<SymTensor> {
        if x.len() != self.n {
            return Err(Error::DimMismatch { expected: self.n, got: x.len() });
        }
        let data: Vec<Complex64> = self.coefficient_polys(l).iter().map(|p| p.eval(x)).collect();
        SymTensor::new(self.n, l, data)
    }
}

/// All exponent vectors of length `n` summing to `total`.
pub(crate) fn compositions(total: u32, n: usize) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, n - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn sub_indices(alpha: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &a in alpha {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                (0..=a).map(move |g| {
                    let mut p = prefix.clone();
                    p.push(g);
                    p
                })
            })
            .collect();
    }
    out
}

/// Gradient of `φ` as rank-one compressed components.
pub fn poly_gradient(phi: &Polynomial) -> Vec<Polynomial> {
    (0..phi.dim()).map(|j| phi.derivative(j)).collect()
}

/// Exact `i_δ` on a tensor of rank `rank` whose components are polynomials.
pub fn poly_i_delta(components: &[Polynomial], n: usize, rank: usize) -> Result<Vec<Polynomial>> {
    let map = plan::i_delta(n, rank);
    if components.len() != map.cols {
        return Err(Error::DimMismatch { expected: map.cols, got: components.len() });
    }
    let mut out = vec![Polynomial::zero(n); map.rows];
    for e in &map.entries {
        let w = Scalar::new(
            BigRational::new((*e.coef.numer()).into(), (*e.coef.denom()).into()),
            BigRational::zero(),
        );
        out[e.out] = &out[e.out] + &components[e.inp].scale(&w);
    }
    Ok(out)
}

/// `(−1)^m 2m i_δ^{m−1}(∇φ)` as exact polynomial components.
pub fn gauge_top_coefficient(phi: &Polynomial, m: usize) -> Result<Vec<Polynomial>> {
    let n = phi.dim();
    let mut acc = poly_gradient(phi);
    for r in 0..m.saturating_sub(1) {
        acc = poly_i_delta(&acc, n, 1 + 2 * r)?;
    }
    let sign = if m % 2 == 0 { 1 } else { -1 };
    let s = integer(sign * 2 * m as i64);
    Ok(acc.iter().map(|p| p.scale(&s)).collect())
}

/// Float view of compressed polynomial components at `x`.
pub fn eval_components(components: &[Polynomial], n: usize, rank: usize, x: &[f64]) -> Result<SymTensor> {
    SymTensor::new(n, rank, components.iter().map(|p| p.eval(x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::poly::Polynomial as P;

    #[test]
    fn polyharmonic_examples() {
        let lap = PolyDiffOp::laplacian(2);
        assert_eq!(lap.apply(&P::parse("x1^2 + x2^2", 2).unwrap()).unwrap(), P::parse("4", 2).unwrap());
        let bi = PolyDiffOp::polyharmonic(2, 2);
        assert_eq!(bi.apply(&P::parse("x1^4", 2).unwrap()).unwrap(), P::parse("24", 2).unwrap());
        let u = P::parse("x1^3*x2 - 2*x2^5 + x1*x2", 2).unwrap();
        assert_eq!(PolyDiffOp::identity(2).apply(&u).unwrap(), u);
    }

    #[test]
    fn leibniz_composition() {
        let x1 = PolyDiffOp::multiplication(&P::var(2, 0));
        let d1 = PolyDiffOp::partial(2, 0);
        let got = d1.compose(&x1).unwrap();
        let expect = x1.compose(&d1).unwrap().add(&PolyDiffOp::identity(2));
        assert_eq!(got, expect);
        assert_eq!(d1.compose(&PolyDiffOp::identity(2)).unwrap(), d1);
    }

    #[test]
    fn conjugation_examples() {
        let phi = P::var(2, 0);
        let got = PolyDiffOp::partial(2, 0).conjugate_exp(&phi).unwrap();
        assert_eq!(got, PolyDiffOp::partial(2, 0).add(&PolyDiffOp::identity(2)));

        // −Δ ↦ −Δ − 2∇φ·∇ − Δφ − |∇φ|²
        let phi = P::parse("x1^2*x2 + 3*x2", 2).unwrap();
        let got = PolyDiffOp::polyharmonic(2, 1).conjugate_exp(&phi).unwrap();
        let grad = poly_gradient(&phi);
        let mut expect = PolyDiffOp::polyharmonic(2, 1);
        for (j, g) in grad.iter().enumerate() {
            expect = expect.sub(&PolyDiffOp::partial(2, j).left_multiply(&g.scale(&integer(2))));
        }
        let lap_phi = PolyDiffOp::laplacian(2).apply(&phi).unwrap();
        let sq = &(&grad[0] * &grad[0]) + &(&grad[1] * &grad[1]);
        expect = expect.sub(&PolyDiffOp::multiplication(&(&lap_phi + &sq)));
        assert_eq!(got, expect);
    }

    #[test]
    fn truncated_conjugation_keeps_top_orders() {
        let phi = P::parse("x1^2*x2^2 - x1*x2^3", 2).unwrap();
        let op = PolyDiffOp::polyharmonic(2, 2);
        let full = op.conjugate_exp(&phi).unwrap();
        let top = op.conjugate_exp_truncated(&phi, 3).unwrap();
        for l in 3..=4 {
            assert_eq!(full.coefficient_polys(l), top.coefficient_polys(l));
        }
        assert!(top.coefficient_polys(2).iter().all(|p| p.is_zero()));
    }

    #[test]
    fn coefficient_conventions() {
        let lap = PolyDiffOp::laplacian(2).coefficient_tensor(2, &[0.3, 0.1]).unwrap();
        assert_eq!(lap.components(), &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let mut alpha = PolyDiffOp::zero(2);
        alpha.add_term(vec![1, 1], P::one(2));
        let t = alpha.coefficient_tensor(2, &[0.0, 0.0]).unwrap();
        assert_eq!(t.get(&[0, 1]), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn composition_guard() {
        let big = PolyDiffOp::polyharmonic(1, 7);
        assert!(matches!(big.compose(&big), Err(Error::SizeGuard(_))));
    }
}
