use super::diffop::PolyDiffOp;
use super::poly::{imaginary_unit, rational, Polynomial};
use crate::error::{Error, Result};

pub const MAX_BASIS_DEGREE: u32 = 8;

fn harmonic_seeds(n: usize, max_degree: u32) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::one(n)];
    out.extend((0..n).map(|j| Polynomial::var(n, j)));
    let half = rational(1, 2);
    for d in 2..=max_degree {
        for a in 0..n {
            for b in a + 1..n {
                let w = &Polynomial::var(n, a) + &Polynomial::var(n, b).scale(&imaginary_unit());
                let p = w.pow(d);
                let conj = p.conj();
                out.push((&p + &conj).scale(&half));
                out.push((&p - &conj).scale(&(half.clone() * -imaginary_unit())));
            }
        }
    }
    out
}

/// Polynomials of degree `≤ max_degree` annihilated by `Δ^m`: monomials of
/// degree `< 2m`, then harmonic seeds times `|x|^{2k}` or `x_j^k`, `k < m`. Each entry is verified
/// exactly; the list is ordered by degree.
pub fn polyharmonic_basis(m: usize, max_degree: u32, n: usize) -> Result<Vec<Polynomial>> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("polyharmonic basis needs m >= 1 and n >= 1"));
    }
    if max_degree > MAX_BASIS_DEGREE {
        return Err(Error::invalid(format!("degree {max_degree} exceeds {MAX_BASIS_DEGREE}")));
    }
    let r2 = (0..n).fold(Polynomial::zero(n), |acc, j| &acc + &Polynomial::var(n, j).pow(2));
    let mut weights = vec![Polynomial::one(n)];
    for k in 1..m as u32 {
        weights.push(r2.pow(k));
        weights.extend((0..n).map(|j| Polynomial::var(n, j).pow(k)));
    }
    let op = PolyDiffOp::polyharmonic(n, m);
    let mut out: Vec<Polynomial> = Vec::new();
    // every monomial of degree below 2m is killed by Δ^m
    let low = max_degree.min(2 * m as u32 - 1);
    for d in 0..=low {
        for e in super::diffop::compositions(d, n) {
            out.push(Polynomial::monomial(n, e, super::poly::integer(1)));
        }
    }
    for seed in harmonic_seeds(n, max_degree) {
        for w in &weights {
            let p = w * &seed;
            if p.is_zero() || p.degree().unwrap_or(0) > max_degree || out.contains(&p) {
                continue;
            }
            if op.apply(&p)?.is_zero() {
                out.push(p);
            }
        }
    }
    out.sort_by_key(|p| p.degree());
    Ok(out)
}
