use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{check_dim, Error, Result};
use crate::tensor::binomial;

/// Matrix relating `⟨ξ,∂_x⟩^r` of a weighted sum of transforms of
/// increasing order to the individual lowest-order transforms.
///
/// Row `r` (the number of directional derivatives applied) and column `j`
/// hold `c_{m−j}·C(m−j+r, r)`; the unknowns are ordered
/// `(I^m F_m, …, I^0 F_0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationMatrix {
    m: usize,
    constants: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl SeparationMatrix {
    /// `constants[j]` is `c_j`, `j = 0..=m`.
    pub fn new(m: usize, constants: &[f64]) -> Result<Self> {
        check_dim(m + 1, constants.len())?;
        if let Some(j) = constants.iter().position(|&c| c == 0.0 || !c.is_finite()) {
            return Err(Error::invalid(format!("constant c_{j} must be nonzero and finite")));
        }
        let matrix = DMatrix::from_fn(m + 1, m + 1, |r, j| {
            constants[m - j] * binomial(m - j + r, r) as f64
        });
        Ok(Self { m, constants: constants.to_vec(), matrix })
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// LU determinant with partial pivoting.
    pub fn determinant(&self) -> f64 {
        self.matrix.clone().lu().determinant()
    }

    /// Closed form `(−1)^{m(m+1)/2} Π c_j`.
    pub fn formula_determinant(&self) -> f64 {
        let sign = if (self.m * (self.m + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        sign * self.constants.iter().product::<f64>()
    }

    /// Right-hand side `A·X` for known separated values.
    pub fn assemble(&self, separated: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.m + 1, separated.len())?;
        Ok((0..=self.m)
            .map(|r| (0..=self.m).map(|j| separated[j] * self.matrix[(r, j)]).sum())
            .collect())
    }

    /// Solves `A·X = rhs` for `X = (I^m F_m, …, I^0 F_0)`.
    pub fn separate(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.m + 1, rhs.len())?;
        let lu = self.matrix.clone().lu();
        let solve = |part: Vec<f64>| {
            lu.solve(&nalgebra::DVector::from_vec(part))
                .ok_or_else(|| Error::Singular("separation matrix".into()))
        };
        let re = solve(rhs.iter().map(|v| v.re).collect())?;
        let im = solve(rhs.iter().map(|v| v.im).collect())?;
        Ok(re.iter().zip(im.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect())
    }
}

/// Separates per-`r` data into `(I^m F_m, …, I^0 F_0)`.
pub fn separate_components(m: usize, constants: &[f64], rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    SeparationMatrix::new(m, constants)?.separate(rhs)
}

/// The shifted variant `d_m I^{k+m−1}F_m + ⋯ + d_1 I^k F_1`: the same
/// system of order `m − 1` with constants `d_1..d_m`, unknowns
/// `(I^{m−1}F_m, …, I^0 F_1)`.
pub fn separate_shifted(m: usize, d: &[f64], rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    if m == 0 {
        return Err(Error::invalid("the shifted system needs m >= 1"));
    }
    check_dim(m, d.len())?;
    SeparationMatrix::new(m - 1, d)?.separate(rhs)
}

/// Result of comparing the computed determinant with the closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminantCheck {
    pub computed: f64,
    pub formula: f64,
    pub rel_error: f64,
}

pub fn determinant_check(m: usize, constants: &[f64]) -> Result<DeterminantCheck> {
    if m > 12 {
        return Err(Error::invalid("determinant check supports m <= 12"));
    }
    let a = SeparationMatrix::new(m, constants)?;
    let (computed, formula) = (a.determinant(), a.formula_determinant());
    let rel_error = (computed - formula).abs() / formula.abs();
    Ok(DeterminantCheck { computed, formula, rel_error })
}

/// Integer matrix `C(m−j+r, r)`, i.e. the separation matrix with unit
/// constants.
pub fn unit_separation_matrix(m: usize) -> Vec<Vec<BigInt>> {
    (0..=m)
        .map(|r| (0..=m).map(|j| BigInt::from(binomial(m - j + r, r))).collect())
        .collect()
}

/// Determinant of the unit matrix by repeated column differencing.
///
/// Replacing column `j` by `col_j − col_{j+1}` leaves a first row of the
/// form `(0, …, 0, 1)`; expanding along it leaves a minor of the same
/// binomial shape one size smaller, so the determinant is a product of
/// signs. Each step is carried out on the integer entries, so the result is
/// exact.
pub fn column_differencing_determinant(m: usize) -> BigInt {
    let mut b = unit_separation_matrix(m);
    let mut det = BigInt::one();
    while b.len() > 1 {
        let size = b.len();
        debug_assert!(b[0].iter().all(|v| v.is_one()), "first row must be all ones");
        for row in b.iter_mut() {
            for j in 0..size - 1 {
                let next = row[j + 1].clone();
                row[j] -= next;
            }
        }
        // expand along the first row, whose only nonzero is at (0, size−1)
        if (size - 1) % 2 == 1 {
            det = -det;
        }
        det *= &b[0][size - 1];
        b = b[1..].iter().map(|row| row[..size - 1].to_vec()).collect();
    }
    det * &b[0][0]
}

/// Exact integer determinant by fraction-free (Bareiss) elimination.
pub fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Exact determinant of the separation matrix with integer constants.
pub fn exact_determinant(m: usize, constants: &[i64]) -> Result<BigInt> {
    check_dim(m + 1, constants.len())?;
    if constants.iter().any(|&c| c == 0) {
        return Err(Error::invalid("constants must be nonzero"));
    }
    let a = (0..=m)
        .map(|r| {
            (0..=m)
                .map(|j| BigInt::from(constants[m - j]) * BigInt::from(binomial(m - j + r, r)))
                .collect()
        })
        .collect();
    Ok(bareiss_determinant(a))
}
