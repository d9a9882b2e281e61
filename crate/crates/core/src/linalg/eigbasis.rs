//! Validated eigenvector bases and the `EIGB1` sidecar format.
//!
//! An [`EigenBasis`] holds `Z` and the eigenvalues `γⱼ` of some operator `A`
//! together with the shift `σ` that defines `B = A − σI = ZΛZ⁻¹`, so that
//! `λⱼ = γⱼ − σ`. Columns are ordered so that the target eigenvalue (minimal
//! `|γⱼ − σ|`) comes first.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};

use crate::krylov::LinearOperator;
use crate::linalg::dense::{DenseMatrix, LuFactors};
use crate::linalg::norms::{inverse_norm2, spectral_norm2, NormEstimate};
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::vector::{norm2, sub};
use crate::{Error, Result, C64};

/// Relative tolerance for `‖Az − γz‖₂ ≤ tol·‖A‖_F` and the inverse round trip.
pub const BASIS_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct EigenBasis {
    eigenvalues: Vec<C64>,
    z: DenseMatrix,
    lu: LuFactors,
    z_norm2: NormEstimate,
    z_inv_norm2: NormEstimate,
    shift: C64,
}

impl EigenBasis {
    /// Validate eigenpairs of a sparse matrix. Columns are normalized to unit
    /// 2-norm and the shift is initially zero.
    pub fn new(a: &SparseMatrix, eigenvalues: Vec<C64>, z: DenseMatrix) -> Result<Self> {
        Self::from_operator(a, a.frobenius_norm(), eigenvalues, z)
    }

    /// Validate against any operator with known Frobenius norm.
    pub fn from_operator<O: LinearOperator + ?Sized>(
        op: &O,
        op_frobenius: f64,
        eigenvalues: Vec<C64>,
        mut z: DenseMatrix,
    ) -> Result<Self> {
        let n = eigenvalues.len();
        if z.nrows() != n || z.ncols() != n || op.dim() != n {
            return Err(Error::Dimension(format!(
                "eigen-basis: {} eigenvalues, Z is {}x{}, operator has dimension {}",
                n,
                z.nrows(),
                z.ncols(),
                op.dim()
            )));
        }
        for j in 0..n {
            let nrm = norm2(z.col(j));
            if nrm == 0.0 {
                return Err(Error::InvalidBasis(format!("column {j} is zero")));
            }
            for v in z.col_mut(j) {
                *v /= nrm;
            }
        }
        let tol = BASIS_TOL * op_frobenius.max(f64::MIN_POSITIVE);
        let mut az = vec![C64::new(0.0, 0.0); n];
        for (j, gamma) in eigenvalues.iter().enumerate() {
            op.apply(z.col(j), &mut az);
            let r: Vec<C64> = az.iter().zip(z.col(j)).map(|(a, x)| a - gamma * x).collect();
            let rn = norm2(&r);
            if rn > tol {
                return Err(Error::InvalidBasis(format!(
                    "eigenpair {j}: residual {rn:e} exceeds {tol:e}"
                )));
            }
        }
        let lu = z.lu().map_err(|_| Error::InvalidBasis("Z is singular".into()))?;

        // Z⁻¹(Zv) = v for a few pseudo-random probes
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..3 {
            let v: Vec<C64> = (0..n)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let back = lu.solve(&z.matvec(&v));
            let err = norm2(&sub(&back, &v)) / norm2(&v);
            if err > BASIS_TOL {
                return Err(Error::InvalidBasis(format!(
                    "Z⁻¹(Zv) round trip error {err:e} exceeds {BASIS_TOL:e}"
                )));
            }
        }
        let z_norm2 = spectral_norm2(&z);
        let z_inv_norm2 = inverse_norm2(&lu);
        Ok(Self {
            eigenvalues,
            z,
            lu,
            z_norm2,
            z_inv_norm2,
            shift: C64::new(0.0, 0.0),
        })
    }

    /// Reorder columns so the target (minimal `|γⱼ − σ|`, ties by index) and
    /// then the remaining eigenvalues by increasing distance come first, and
    /// record `σ`.
    pub fn with_shift(mut self, sigma: C64) -> Self {
        let n = self.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let da = (self.eigenvalues[a] - sigma).norm();
            let db = (self.eigenvalues[b] - sigma).norm();
            da.partial_cmp(&db).unwrap().then(a.cmp(&b))
        });
        if order.iter().enumerate().any(|(i, &o)| i != o) {
            let z = DenseMatrix::from_fn(n, n, |i, j| self.z[(i, order[j])]);
            self.eigenvalues = order.iter().map(|&o| self.eigenvalues[o]).collect();
            self.lu = z.lu().expect("column permutation of a nonsingular matrix");
            self.z = z;
        }
        self.shift = sigma;
        self
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues `γⱼ` of the validated operator.
    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    /// Eigenvalues `λⱼ = γⱼ − σ` of `B`.
    pub fn shifted_eigenvalues(&self) -> Vec<C64> {
        self.eigenvalues.iter().map(|g| g - self.shift).collect()
    }

    pub fn shift(&self) -> C64 {
        self.shift
    }

    pub fn z(&self) -> &DenseMatrix {
        &self.z
    }

    /// `Z⁻¹v`.
    pub fn solve(&self, v: &[C64]) -> Vec<C64> {
        self.lu.solve(v)
    }

    pub fn z_norm2(&self) -> f64 {
        self.z_norm2.value
    }

    pub fn z_norm2_estimate(&self) -> NormEstimate {
        self.z_norm2
    }

    /// `κ₂(Z) = ‖Z‖₂‖Z⁻¹‖₂`.
    pub fn z_cond2(&self) -> f64 {
        self.z_norm2.value * self.z_inv_norm2.value
    }

    pub fn read_eigb1(path: impl AsRef<Path>) -> Result<(Vec<C64>, DenseMatrix)> {
        parse_eigb1(&fs::read_to_string(path)?)
    }
}

fn parse_complex_line(line: usize, text: &str) -> Result<C64> {
    let mut it = text.split_whitespace();
    let mut next = || -> Result<f64> {
        let t = it.next().ok_or_else(|| Error::Parse {
            line,
            msg: "expected 're im'".into(),
        })?;
        t.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad number '{t}'"),
        })
    };
    let re = next()?;
    let im = next()?;
    Ok(C64::new(re, im))
}

/// Parse `EIGB1`: header `EIGB1 n`, then `n` eigenvalue lines and `n²`
/// column-major entries of `Z`, each as `re im`.
pub fn parse_eigb1(text: &str) -> Result<(Vec<C64>, DenseMatrix)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (lno, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty EIGB1 file".into(),
    })?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 2 || tok[0] != "EIGB1" {
        return Err(Error::Parse {
            line: lno,
            msg: "expected header 'EIGB1 n'".into(),
        });
    }
    let n: usize = tok[1].parse().map_err(|_| Error::Parse {
        line: lno,
        msg: format!("bad dimension '{}'", tok[1]),
    })?;
    let mut eig = Vec::with_capacity(n);
    let mut data = Vec::with_capacity(n * n);
    for (lno, l) in lines {
        let v = parse_complex_line(lno, l)?;
        if eig.len() < n {
            eig.push(v);
        } else {
            data.push(v);
        }
    }
    if eig.len() != n || data.len() != n * n {
        return Err(Error::Parse {
            line: 0,
            msg: format!(
                "expected {} eigenvalues and {} Z entries, found {} and {}",
                n,
                n * n,
                eig.len(),
                data.len()
            ),
        });
    }
    Ok((eig, DenseMatrix::from_col_major(n, n, data)?))
}

pub fn write_eigb1(eigenvalues: &[C64], z: &DenseMatrix) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "EIGB1 {}", eigenvalues.len());
    for v in eigenvalues.iter().chain(z.as_slice()) {
        let _ = writeln!(s, "{:.16e} {:.16e}", v.re, v.im);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector::real;

    #[test]
    fn diagonal_matrix_basis() {
        let a = SparseMatrix::from_diagonal(&real(&[3.0, 1.0, 2.0]));
        let b = EigenBasis::new(&a, real(&[3.0, 1.0, 2.0]), DenseMatrix::identity(3))
            .unwrap()
            .with_shift(C64::new(0.9, 0.0));
        assert_eq!(b.eigenvalues(), &real(&[1.0, 2.0, 3.0])[..]);
        assert!((b.shifted_eigenvalues()[0] - C64::new(0.1, 0.0)).norm() < 1e-15);
        assert!((b.z_norm2() - 1.0).abs() < 1e-12);
        assert!((b.z_cond2() - 1.0).abs() < 1e-12);
        // reordered Z still diagonalizes A
        let z1 = b.z().col(0);
        assert_eq!(z1[1], C64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_wrong_eigenpair() {
        let a = SparseMatrix::from_diagonal(&real(&[1.0, 2.0]));
        let err = EigenBasis::new(&a, real(&[1.0, 3.0]), DenseMatrix::identity(2)).unwrap_err();
        assert!(matches!(err, Error::InvalidBasis(_)));
    }

    #[test]
    fn eigb1_round_trip() {
        let z = DenseMatrix::from_fn(2, 2, |i, j| C64::new(i as f64 + 0.1, j as f64 - 0.3));
        let e = vec![C64::new(1.5, -2.0), C64::new(0.25, 0.0)];
        let (e2, z2) = parse_eigb1(&write_eigb1(&e, &z)).unwrap();
        assert_eq!(e, e2);
        assert_eq!(z, z2);
    }

    #[test]
    fn eigb1_rejects_short_file() {
        assert!(parse_eigb1("EIGB1 2\n1 0\n2 0\n1 0\n").is_err());
        assert!(parse_eigb1("EIGB2 1\n1 0\n1 0\n").is_err());
    }
}
