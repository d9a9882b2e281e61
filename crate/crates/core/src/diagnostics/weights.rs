use crate::linalg::dense::DenseMatrix;
use crate::linalg::eigbasis::EigenBasis;
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::vector::norm2;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightRecord {
    /// `w = Z⁻¹y/‖y‖₂`
    pub w: Vec<C64>,
    pub w1: C64,
    pub w2_norm: f64,
    /// `w̃ⱼ = wⱼ(1 − λⱼ/λ₁)` for `j ≥ 2`.
    pub wt: Vec<C64>,
    pub wt_norm: f64,
    /// `f = Z⁻¹My/‖My‖₂` for generalized problems.
    pub f: Option<Vec<C64>>,
    pub ft: Option<Vec<C64>>,
    pub ft_norm: Option<f64>,
}

impl WeightRecord {
    /// The weights that drive GMRES: `f` when present, else `w`.
    pub fn driving(&self) -> &[C64] {
        self.f.as_deref().unwrap_or(&self.w)
    }

    /// `(|first|, ‖rest‖₂)` of the driving weights.
    pub fn driving_split(&self) -> (f64, f64) {
        let d = self.driving();
        (d[0].norm(), norm2(&d[1..]))
    }
}

fn tilt(v: &[C64], lambda: &[C64]) -> Vec<C64> {
    let l1 = lambda[0];
    v.iter()
        .zip(lambda)
        .skip(1)
        .map(|(w, l)| w * (C64::new(1.0, 0.0) - l / l1))
        .collect()
}

fn normalized_solve(basis: &EigenBasis, y: &[C64]) -> Result<Vec<C64>> {
    let ny = norm2(y);
    if ny == 0.0 {
        return Err(Error::InvalidArgument("weights of a zero vector".into()));
    }
    Ok(basis.solve(y).into_iter().map(|v| v / ny).collect())
}

/// Weights of `y` in the eigenvector basis of `B`, plus `f = Z⁻¹My` when a
/// mass matrix is given.
pub fn compute_weights(basis: &EigenBasis, y: &[C64], mass: Option<&SparseMatrix>) -> Result<WeightRecord> {
    let n = basis.dim();
    if y.len() != n {
        return Err(Error::Dimension(format!(
            "vector has length {} but the basis has dimension {n}",
            y.len()
        )));
    }
    let lambda = basis.shifted_eigenvalues();
    if lambda[0].norm() == 0.0 {
        return Err(Error::ShiftIsEigenvalue);
    }
    let w = normalized_solve(basis, y)?;
    let wt = tilt(&w, &lambda);
    let (f, ft, ft_norm) = match mass {
        Some(m) => {
            let mut my = vec![C64::new(0.0, 0.0); n];
            m.spmv_into(y, &mut my);
            let f = normalized_solve(basis, &my)?;
            let ft = tilt(&f, &lambda);
            let nrm = norm2(&ft);
            (Some(f), Some(ft), Some(nrm))
        }
        None => (None, None, None),
    };
    Ok(WeightRecord {
        w1: w[0],
        w2_norm: norm2(&w[1..]),
        wt_norm: norm2(&wt),
        w,
        wt,
        f,
        ft,
        ft_norm,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockWeightRecord {
    /// `W = Z⁻¹Y` (or `Z⁻¹MY`).
    pub w: DenseMatrix,
    pub w1_norm: f64,
    pub w2_norm: f64,
}

/// `W = Z⁻¹Y` (`Z⁻¹MY` with a mass matrix) and its block split.
pub fn compute_block_weights(
    basis: &EigenBasis,
    y: &DenseMatrix,
    mass: Option<&SparseMatrix>,
) -> Result<BlockWeightRecord> {
    let n = basis.dim();
    if y.nrows() != n {
        return Err(Error::Dimension(format!(
            "block has {} rows but the basis has dimension {n}",
            y.nrows()
        )));
    }
    let cols: Vec<Vec<C64>> = y
        .columns()
        .into_iter()
        .map(|c| match mass {
            Some(m) => {
                let mut mc = vec![C64::new(0.0, 0.0); n];
                m.spmv_into(&c, &mut mc);
                basis.solve(&mc)
            }
            None => basis.solve(&c),
        })
        .collect();
    let w = DenseMatrix::from_columns(n, &cols)?;
    let (w1_norm, w2_norm) = block_weight_split(&w, y.ncols());
    Ok(BlockWeightRecord { w, w1_norm, w2_norm })
}

/// Frobenius norms of the leading `u` rows and the remaining rows.
pub fn block_weight_split(w: &DenseMatrix, u: usize) -> (f64, f64) {
    let u = u.min(w.nrows());
    let top = w.rows(0, u).frobenius_norm();
    let bottom = w.rows(u, w.nrows()).frobenius_norm();
    (top, bottom)
}
