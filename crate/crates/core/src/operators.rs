//! Constant-coefficient second-order operators
//!
//! `P[a, D] u = sum_{l,j} a_{lj} d_l d_j u + sum_j a_j d_j u + a u`
//!
//! with a real symmetric principal matrix `a2`, complex drift `a1` and complex
//! zeroth-order coefficient `a0`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Constructors reject principal parts whose ellipticity margin is at or below this.
pub const ELLIPTICITY_THRESHOLD: f64 = 1e-12;

/// Coefficients `(a2, a1, a0)` of an elliptic operator in dimension 2 or 3.
///
/// Immutable after construction; `a2` is bitwise symmetric and its smallest
/// eigenvalue exceeds [`ELLIPTICITY_THRESHOLD`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorCoefficients {
    dim: usize,
    a2: [[f64; 3]; 3],
    a1: [Complex64; 3],
    a0: Complex64,
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::Dimension(n))
    }
}

impl OperatorCoefficients {
    /// Build from a principal matrix and lower-order coefficients.
    ///
    /// The principal matrix is symmetrized as `(a + a^t) / 2` so the stored
    /// matrix is exactly symmetric.
    pub fn new(a2: &[Vec<f64>], a1: &[Complex64], a0: Complex64) -> Result<Self> {
        let n = a2.len();
        check_dim(n)?;
        if a1.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a1.len() });
        }
        let mut m = [[0.0; 3]; 3];
        for (l, row) in a2.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidArgument(format!("a2[{l}][{j}] is not finite")));
                }
                m[l][j] = *v;
            }
        }
        for l in 0..n {
            for j in (l + 1)..n {
                let s = 0.5 * (m[l][j] + m[j][l]);
                m[l][j] = s;
                m[j][l] = s;
            }
        }
        let mut drift = [Complex64::new(0.0, 0.0); 3];
        drift[..n].copy_from_slice(a1);
        let op = Self { dim: n, a2: m, a1: drift, a0 };
        let margin = op.ellipticity_margin();
        if !(margin > ELLIPTICITY_THRESHOLD) {
            return Err(Error::Ellipticity { margin, threshold: ELLIPTICITY_THRESHOLD });
        }
        Ok(op)
    }

    /// The Laplace operator in dimension `n`.
    pub fn laplacian(n: usize) -> Result<Self> {
        check_dim(n)?;
        Self::principal(&identity_rows(n))
    }

    /// `Delta - kappa^2`.
    pub fn modified_helmholtz(n: usize, kappa: f64) -> Result<Self> {
        check_dim(n)?;
        let zero = vec![Complex64::new(0.0, 0.0); n];
        Self::new(&identity_rows(n), &zero, Complex64::new(-kappa * kappa, 0.0))
    }

    /// Purely second-order operator with the given principal matrix.
    pub fn principal(a2: &[Vec<f64>]) -> Result<Self> {
        let zero = vec![Complex64::new(0.0, 0.0); a2.len()];
        Self::new(a2, &zero, Complex64::new(0.0, 0.0))
    }

    /// Build from coefficients `a_gamma` indexed by multi-indices `|gamma| <= 2`.
    ///
    /// `a_{jj} = a_{2 e_j}`, `a_{lj} = a_{e_l + e_j} / 2` for `l != j`,
    /// `a_j = a_{e_j}`, `a = a_0`. Missing keys are zero.
    pub fn from_multiindex(dim: usize, coeffs: &BTreeMap<Vec<usize>, Complex64>) -> Result<Self> {
        check_dim(dim)?;
        let mut a2 = vec![vec![0.0; dim]; dim];
        let mut a1 = vec![Complex64::new(0.0, 0.0); dim];
        let mut a0 = Complex64::new(0.0, 0.0);
        for (gamma, &c) in coeffs {
            if gamma.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: gamma.len() });
            }
            let order: usize = gamma.iter().sum();
            match order {
                0 => a0 = c,
                1 => {
                    let j = gamma.iter().position(|&g| g == 1).unwrap();
                    a1[j] = c;
                }
                2 => {
                    if c.im != 0.0 {
                        return Err(Error::Symmetry(gamma.clone()));
                    }
                    if let Some(j) = gamma.iter().position(|&g| g == 2) {
                        a2[j][j] = c.re;
                    } else {
                        let mut it = gamma.iter().enumerate().filter(|(_, &g)| g == 1).map(|(i, _)| i);
                        let (l, j) = (it.next().unwrap(), it.next().unwrap());
                        a2[l][j] = 0.5 * c.re;
                        a2[j][l] = 0.5 * c.re;
                    }
                }
                _ => return Err(Error::MultiIndexOrder(gamma.clone())),
            }
        }
        Self::new(&a2, &a1, a0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a2(&self, l: usize, j: usize) -> f64 {
        self.a2[l][j]
    }

    pub fn a2_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|l| self.a2[l][..self.dim].to_vec()).collect()
    }

    pub fn a1(&self) -> &[Complex64] {
        &self.a1[..self.dim]
    }

    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    pub(crate) fn a2_array(&self) -> &[[f64; 3]; 3] {
        &self.a2
    }

    pub fn has_lower_order_terms(&self) -> bool {
        self.a0 != Complex64::new(0.0, 0.0) || self.a1().iter().any(|c| *c != Complex64::new(0.0, 0.0))
    }

    /// `inf_{|xi| = 1} xi^t a2 xi`, the smallest eigenvalue of `a2`.
    pub fn ellipticity_margin(&self) -> f64 {
        let n = self.dim;
        let m = DMatrix::from_fn(n, n, |l, j| self.a2[l][j]);
        SymmetricEigen::new(m).eigenvalues.min()
    }

    /// Lower-triangular `T` with positive diagonal and `T T^t = a2`.
    pub fn factor_principal(&self) -> Result<Vec<Vec<f64>>> {
        let t = cholesky(&self.a2, self.dim)?;
        Ok((0..self.dim).map(|l| t[l][..self.dim].to_vec()).collect())
    }

    /// Apply the operator to `u` at `x` with second-order central differences.
    pub fn apply_fd<F, C>(&self, u: F, x: &[f64], h: f64) -> Complex64
    where
        F: Fn(&[f64]) -> C,
        C: Into<Complex64>,
    {
        let n = self.dim;
        assert_eq!(x.len(), n, "point dimension");
        assert!(h > 0.0, "step must be positive");
        let eval = |shift: &[(usize, f64)]| -> Complex64 {
            let mut y = x.to_vec();
            for &(k, s) in shift {
                y[k] += s;
            }
            u(&y).into()
        };
        let u0 = eval(&[]);
        let h2 = h * h;
        let mut acc = self.a0 * u0;
        for l in 0..n {
            let up = eval(&[(l, h)]);
            let um = eval(&[(l, -h)]);
            acc += self.a2[l][l] * (up - 2.0 * u0 + um) / h2;
            acc += self.a1[l] * (up - um) / (2.0 * h);
            for j in (l + 1)..n {
                let mixed = eval(&[(l, h), (j, h)]) - eval(&[(l, h), (j, -h)]) - eval(&[(l, -h), (j, h)])
                    + eval(&[(l, -h), (j, -h)]);
                acc += 2.0 * self.a2[l][j] * mixed / (4.0 * h2);
            }
        }
        acc
    }
}

fn identity_rows(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|l| (0..n).map(|j| if l == j { 1.0 } else { 0.0 }).collect()).collect()
}

pub(crate) fn cholesky(a: &[[f64; 3]; 3], n: usize) -> Result<[[f64; 3]; 3]> {
    let mut t = [[0.0; 3]; 3];
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= t[j][k] * t[j][k];
        }
        if !(d > 0.0) {
            return Err(Error::Factorization { pivot: j, value: d });
        }
        let djj = d.sqrt();
        t[j][j] = djj;
        for i in (j + 1)..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= t[i][k] * t[j][k];
            }
            t[i][j] = s / djj;
        }
    }
    Ok(t)
}
