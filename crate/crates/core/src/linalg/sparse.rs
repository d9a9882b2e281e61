//! Compressed sparse row storage.

use std::collections::BTreeMap;

use crate::linalg::dense::DenseMatrix;
use crate::{Error, Result, C64};

/// CSR matrix over complex scalars.
///
/// Column indices are strictly increasing within each row; duplicates are
/// never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    /// Validate raw CSR arrays.
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<C64>,
    ) -> Result<Self> {
        if row_offsets.len() != nrows + 1 || row_offsets[0] != 0 {
            return Err(Error::InvalidArgument(
                "row_offsets must have length nrows + 1 and start at 0".into(),
            ));
        }
        if col_indices.len() != values.len() || *row_offsets.last().unwrap() != values.len() {
            return Err(Error::InvalidArgument(
                "row_offsets[last], col_indices and values disagree on nnz".into(),
            ));
        }
        for i in 0..nrows {
            let (s, e) = (row_offsets[i], row_offsets[i + 1]);
            if e < s {
                return Err(Error::InvalidArgument(format!(
                    "row_offsets decreases at row {i}"
                )));
            }
            let cols = &col_indices[s..e];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "column indices in row {i} are not strictly increasing"
                )));
            }
            if cols.iter().any(|&c| c >= ncols) {
                return Err(Error::InvalidArgument(format!(
                    "column index out of range in row {i}"
                )));
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Assemble from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self> {
        let mut rows: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); nrows];
        for (i, j, v) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::Dimension(format!(
                    "entry ({i}, {j}) outside a {nrows}x{ncols} matrix"
                )));
            }
            *rows[i].entry(j).or_insert(C64::new(0.0, 0.0)) += v;
        }
        let mut row_offsets = Vec::with_capacity(nrows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for row in rows {
            for (j, v) in row {
                col_indices.push(j);
                values.push(v);
            }
            row_offsets.push(col_indices.len());
        }
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    pub fn from_diagonal(d: &[C64]) -> Self {
        let n = d.len();
        Self {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: d.to_vec(),
        }
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let trip = (0..a.nrows()).flat_map(|i| {
            (0..a.ncols()).filter_map(move |j| {
                let v = a[(i, j)];
                (v != C64::new(0.0, 0.0)).then_some((i, j, v))
            })
        });
        Self::from_triplets(a.nrows(), a.ncols(), trip.collect::<Vec<_>>()).expect("in range")
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[C64]) {
        let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[s..e], &self.values[s..e])
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc + v.norm_sqr()).sqrt()
    }

    /// `y = A·x`, accumulating each row in ascending column order.
    pub fn spmv_into(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut acc = C64::new(0.0, 0.0);
            for (&j, v) in cols.iter().zip(vals) {
                acc += v * x[j];
            }
            *yi = acc;
        }
    }

    /// `A + alpha·B`.
    pub fn add_scaled(&self, other: &SparseMatrix, alpha: C64) -> Result<SparseMatrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::Dimension(format!(
                "cannot add {}x{} and {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let a = (0..self.nrows).flat_map(|i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, &x)| (i, j, x))
        });
        let b = (0..other.nrows).flat_map(|i| {
            let (c, v) = other.row(i);
            c.iter().zip(v).map(move |(&j, &x)| (i, j, alpha * x))
        });
        Self::from_triplets(self.nrows, self.ncols, a.chain(b).collect::<Vec<_>>())
    }

    /// `A − σI` (square only).
    pub fn shifted(&self, sigma: C64) -> Result<SparseMatrix> {
        if self.nrows != self.ncols {
            return Err(Error::Dimension("shift of a non-square matrix".into()));
        }
        self.add_scaled(&SparseMatrix::identity(self.nrows), -sigma)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[(i, j)] = v;
            }
        }
        d
    }
}

/// `A·x`.
pub fn spmv(a: &SparseMatrix, x: &[C64]) -> Result<Vec<C64>> {
    if x.len() != a.ncols() {
        return Err(Error::Dimension(format!(
            "spmv: vector of length {} for {} columns",
            x.len(),
            a.ncols()
        )));
    }
    let mut y = vec![C64::new(0.0, 0.0); a.nrows()];
    a.spmv_into(x, &mut y);
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector::real;

    fn tridiag3() -> SparseMatrix {
        let t = [
            (0, 0, 2.0),
            (0, 1, -1.0),
            (1, 0, -1.0),
            (1, 1, 2.0),
            (1, 2, -1.0),
            (2, 1, -1.0),
            (2, 2, 2.0),
        ];
        SparseMatrix::from_triplets(3, 3, t.iter().map(|&(i, j, v)| (i, j, C64::new(v, 0.0))))
            .unwrap()
    }

    #[test]
    fn diagonal_action() {
        let a = SparseMatrix::from_diagonal(&real(&[2.0, 3.0]));
        assert_eq!(spmv(&a, &real(&[1.0, 1.0])).unwrap(), real(&[2.0, 3.0]));
    }

    #[test]
    fn zero_vector_maps_to_zero() {
        let a = tridiag3();
        assert_eq!(spmv(&a, &real(&[0.0; 3])).unwrap(), real(&[0.0; 3]));
    }

    #[test]
    fn tridiagonal_matches_dense_oracle() {
        let a = tridiag3();
        let x = real(&[1.0, 2.0, 3.0]);
        let dense = a.to_dense().matvec(&x);
        let y = spmv(&a, &x).unwrap();
        assert_eq!(y, dense);
        assert_eq!(y, real(&[0.0, 0.0, 4.0]));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            spmv(&tridiag3(), &real(&[1.0])),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn rejects_unsorted_columns() {
        let r = SparseMatrix::new(1, 3, vec![0, 2], vec![2, 1], real(&[1.0, 1.0]));
        assert!(r.is_err());
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            vec![(0, 0, C64::new(1.0, 0.0)), (0, 0, C64::new(2.0, 0.0))],
        )
        .unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), C64::new(3.0, 0.0));
    }
}
