//! Analytic test problems with known eigendecompositions.

use std::f64::consts::PI;

use crate::linalg::dense::DenseMatrix;
use crate::linalg::eigbasis::EigenBasis;
use crate::linalg::sparse::SparseMatrix;
use crate::{Error, Result, C64};

/// Tridiagonal Toeplitz stencil: `beta` below, `alpha` on, `gamma` above the diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Stencil {
    pub const fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    /// `tridiag(−1, 2, −1)`
    pub const fn laplacian() -> Self {
        Self::new(2.0, -1.0, -1.0)
    }

    /// Central-difference convection–diffusion: `tridiag(−1−c, 2, −1+c)`.
    pub const fn convection(c: f64) -> Self {
        Self::new(2.0, -1.0 - c, -1.0 + c)
    }

    fn check(&self) -> Result<()> {
        if !(self.beta * self.gamma > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "stencil needs beta*gamma > 0 for a real eigenbasis (beta = {}, gamma = {})",
                self.beta, self.gamma
            )));
        }
        Ok(())
    }

    /// Eigenvalue `p` (1-based) of the `m×m` Toeplitz matrix.
    pub fn eigenvalue(&self, m: usize, p: usize) -> f64 {
        let s = self.beta.signum() * (self.beta * self.gamma).sqrt();
        self.alpha + 2.0 * s * (p as f64 * PI / (m as f64 + 1.0)).cos()
    }

    /// Unnormalized eigenvector `p`: `vⱼ = (β/γ)^{j/2} sin(jpπ/(m+1))`.
    pub fn eigenvector(&self, m: usize, p: usize) -> Vec<f64> {
        let r = (self.beta / self.gamma).sqrt();
        (1..=m)
            .map(|j| r.powi(j as i32) * (j as f64 * p as f64 * PI / (m as f64 + 1.0)).sin())
            .collect()
    }
}

/// `n×n` Toeplitz tridiagonal with sub/diag/super `a`/`b`/`c`.
pub fn gen_tridiag(n: usize, a: f64, b: f64, c: f64) -> Result<SparseMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("gen_tridiag needs n >= 1".into()));
    }
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i > 0 {
            t.push((i, i - 1, C64::new(a, 0.0)));
        }
        t.push((i, i, C64::new(b, 0.0)));
        if i + 1 < n {
            t.push((i, i + 1, C64::new(c, 0.0)));
        }
    }
    SparseMatrix::from_triplets(n, n, t)
}

/// `A = T_x ⊗ I + I ⊗ T_y` on an `m×m` grid with its analytic eigenbasis
/// (eigenvectors are Kronecker products of scaled sine vectors).
pub fn gen_convdiff(m: usize, x: Stencil, y: Stencil) -> Result<(SparseMatrix, EigenBasis)> {
    if m < 2 {
        return Err(Error::InvalidArgument("gen_convdiff needs m >= 2".into()));
    }
    x.check()?;
    y.check()?;
    let n = m * m;
    let idx = |i: usize, j: usize| i * m + j;
    let mut t = Vec::with_capacity(5 * n);
    for i in 0..m {
        for j in 0..m {
            let k = idx(i, j);
            t.push((k, k, C64::new(x.alpha + y.alpha, 0.0)));
            if i > 0 {
                t.push((k, idx(i - 1, j), C64::new(x.beta, 0.0)));
            }
            if i + 1 < m {
                t.push((k, idx(i + 1, j), C64::new(x.gamma, 0.0)));
            }
            if j > 0 {
                t.push((k, idx(i, j - 1), C64::new(y.beta, 0.0)));
            }
            if j + 1 < m {
                t.push((k, idx(i, j + 1), C64::new(y.gamma, 0.0)));
            }
        }
    }
    let a = SparseMatrix::from_triplets(n, n, t)?;

    let vx: Vec<Vec<f64>> = (1..=m).map(|p| x.eigenvector(m, p)).collect();
    let vy: Vec<Vec<f64>> = (1..=m).map(|q| y.eigenvector(m, q)).collect();
    let mut eig = Vec::with_capacity(n);
    let mut z = DenseMatrix::zeros(n, n);
    let mut col = 0;
    for p in 1..=m {
        for q in 1..=m {
            eig.push(C64::new(x.eigenvalue(m, p) + y.eigenvalue(m, q), 0.0));
            let zc = z.col_mut(col);
            for i in 0..m {
                for j in 0..m {
                    zc[idx(i, j)] = C64::new(vx[p - 1][i] * vy[q - 1][j], 0.0);
                }
            }
            col += 1;
        }
    }
    let basis = EigenBasis::new(&a, eig, z)?;
    Ok((a, basis))
}
