use crate::linalg::dense::DenseMatrix;
use crate::linalg::hessenberg::hessenberg_eigenvalues;
use crate::linalg::vector::{axpy, dot, norm2};
use crate::{Error, Result, C64};

use super::gmres::DEFLATION_TOL;
use super::LinearOperator;

/// `B·V_m = V_{m+1}·H̄_m` with orthonormal `V`.
#[derive(Debug, Clone)]
pub struct ArnoldiFactorization {
    /// Basis vectors `v₁..v_{m+1}` (only `m` when breakdown occurred).
    pub basis: Vec<Vec<C64>>,
    /// `(steps+1) × steps` Hessenberg matrix.
    pub hessenberg: DenseMatrix,
    /// Number of Arnoldi steps taken.
    pub steps: usize,
    /// An invariant subspace was found before `m` steps.
    pub breakdown: bool,
}

impl ArnoldiFactorization {
    /// Leading square block `H_m`.
    pub fn square(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.steps, self.steps, |i, j| self.hessenberg[(i, j)])
    }
}

/// `m` steps of Arnoldi with two-pass modified Gram–Schmidt.
pub fn arnoldi<O: LinearOperator + ?Sized>(op: &O, m: usize, seed: &[C64]) -> Result<ArnoldiFactorization> {
    let n = op.dim();
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "Arnoldi needs 1 <= m <= n (m = {m}, n = {n})"
        )));
    }
    if seed.len() != n {
        return Err(Error::Dimension(format!(
            "seed has length {} but the operator has dimension {n}",
            seed.len()
        )));
    }
    let s = norm2(seed);
    if s == 0.0 {
        return Err(Error::InvalidArgument("Arnoldi seed is zero".into()));
    }
    let mut basis = vec![seed.iter().map(|x| x / s).collect::<Vec<_>>()];
    let mut h = DenseMatrix::zeros(m + 1, m);
    let mut steps = 0;
    let mut breakdown = false;
    for j in 0..m {
        let mut w = op.apply_vec(&basis[j]);
        let before = norm2(&w);
        for _ in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
                h[(i, j)] += c;
            }
        }
        steps += 1;
        let beta = norm2(&w);
        h[(j + 1, j)] = C64::new(beta, 0.0);
        if beta <= DEFLATION_TOL * before {
            breakdown = j + 1 < m || beta == 0.0;
            h[(j + 1, j)] = C64::new(0.0, 0.0);
            break;
        }
        basis.push(w.iter().map(|x| x / beta).collect());
    }
    let hessenberg = DenseMatrix::from_fn(steps + 1, steps, |i, j| h[(i, j)]);
    Ok(ArnoldiFactorization {
        basis,
        hessenberg,
        steps,
        breakdown,
    })
}

/// Ritz values from `m` Arnoldi steps (fewer on breakdown).
pub fn arnoldi_ritz<O: LinearOperator + ?Sized>(op: &O, m: usize, seed: &[C64]) -> Result<Vec<C64>> {
    let f = arnoldi(op, m, seed)?;
    hessenberg_eigenvalues(&f.square())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sparse::SparseMatrix;
    use crate::linalg::vector::real;

    #[test]
    fn full_space_is_exact() {
        let b = SparseMatrix::from_diagonal(&real(&[1.0, 2.0, 3.0]));
        let mut r: Vec<f64> = arnoldi_ritz(&b, 3, &real(&[1.0, 1.0, 1.0]))
            .unwrap()
            .iter()
            .map(|z| z.re)
            .collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-8);
        }
    }

    #[test]
    fn breakdown_returns_smaller_set() {
        let b = SparseMatrix::from_diagonal(&real(&[1.0, 2.0, 3.0]));
        let f = arnoldi(&b, 3, &real(&[1.0, 0.0, 0.0])).unwrap();
        assert!(f.breakdown);
        assert_eq!(f.steps, 1);
        let r = arnoldi_ritz(&b, 3, &real(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].re - 1.0).abs() < 1e-14);
    }
}
