//! Column-major dense complex matrices and partial-pivoted LU.

use std::ops::{Index, IndexMut};

use crate::linalg::vector::{dot, norm2};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![C64::new(0.0, 0.0); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                data.push(f(i, j));
            }
        }
        Self { nrows, ncols, data }
    }

    /// Build from column-major storage.
    pub fn from_col_major(nrows: usize, ncols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                nrows,
                ncols
            )));
        }
        Ok(Self { nrows, ncols, data })
    }

    pub fn from_columns(nrows: usize, cols: &[Vec<C64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(nrows * cols.len());
        for c in cols {
            if c.len() != nrows {
                return Err(Error::Dimension(format!(
                    "column of length {} in a matrix with {} rows",
                    c.len(),
                    nrows
                )));
            }
            data.extend_from_slice(c);
        }
        Ok(Self {
            nrows,
            ncols: cols.len(),
            data,
        })
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[C64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.ncols).map(|j| self.col(j).to_vec()).collect()
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.ncols, "matvec dimension mismatch");
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        for (j, xj) in x.iter().enumerate() {
            if *xj == C64::new(0.0, 0.0) {
                continue;
            }
            for (yi, a) in y.iter_mut().zip(self.col(j)) {
                *yi += a * xj;
            }
        }
        y
    }

    /// `Aᴴx`
    pub fn matvec_adjoint(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.nrows, "matvec dimension mismatch");
        (0..self.ncols).map(|j| dot(self.col(j), x)).collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.ncols, other.nrows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.nrows, other.ncols);
        for j in 0..other.ncols {
            let y = self.matvec(other.col(j));
            out.col_mut(j).copy_from_slice(&y);
        }
        out
    }

    pub fn adjoint(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].conj())
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Rows `r0..r1` as a new matrix.
    pub fn rows(&self, r0: usize, r1: usize) -> DenseMatrix {
        DenseMatrix::from_fn(r1 - r0, self.ncols, |i, j| self[(r0 + i, j)])
    }

    pub fn sub_matrix(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        DenseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn lu(&self) -> Result<LuFactors> {
        LuFactors::new(self)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[j * self.nrows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[j * self.nrows + i]
    }
}

/// `PA = LU` with row partial pivoting; `L` unit lower and `U` upper share storage.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension(format!(
                "LU of a non-square {}x{} matrix",
                n,
                a.ncols()
            )));
        }
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let m = lu[(i, k)].norm();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular(k));
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                lu[(i, k)] /= pivot;
            }
            for j in k + 1..n {
                let ukj = lu[(k, j)];
                if ukj == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in k + 1..n {
                    let lik = lu[(i, k)];
                    lu[(i, j)] -= lik * ukj;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    /// Diagonal entry `i` of `U`.
    pub fn pivot(&self, i: usize) -> C64 {
        self.lu[(i, i)]
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Solve `Ax = b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "LU solve dimension mismatch");
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            let xj = x[j];
            for i in j + 1..n {
                x[i] -= self.lu[(i, j)] * xj;
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.lu[(j, j)];
            let xj = x[j];
            for i in 0..j {
                x[i] -= self.lu[(i, j)] * xj;
            }
        }
        x
    }

    /// Solve `Aᴴx = b`.
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "LU solve dimension mismatch");
        // Aᴴ = Uᴴ Lᴴ P, so solve Uᴴ z = b, Lᴴ w = z, x = Pᵀ w.
        let mut z = b.to_vec();
        for j in 0..n {
            let s: C64 = (0..j).map(|i| self.lu[(i, j)].conj() * z[i]).sum();
            z[j] = (z[j] - s) / self.lu[(j, j)].conj();
        }
        for j in (0..n).rev() {
            let s: C64 = (j + 1..n).map(|i| self.lu[(i, j)].conj() * z[i]).sum();
            z[j] -= s;
        }
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k];
        }
        x
    }
}

/// Solve `Zx = v` by partial-pivoted LU.
pub fn dense_lu_solve(z: &DenseMatrix, v: &[C64]) -> Result<Vec<C64>> {
    if v.len() != z.nrows() {
        return Err(Error::Dimension(format!(
            "rhs of length {} for a {}x{} matrix",
            v.len(),
            z.nrows(),
            z.ncols()
        )));
    }
    Ok(LuFactors::new(z)?.solve(v))
}
