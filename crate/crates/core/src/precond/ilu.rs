use std::collections::BTreeSet;

use crate::linalg::sparse::SparseMatrix;
use crate::{Error, Result, C64};

use super::Preconditioner;

/// A pivot smaller than this multiple of the row norm is a breakdown.
pub const PIVOT_TOL: f64 = 1e-14;

/// `A ≈ L·U` with unit lower triangular `L`.
#[derive(Debug, Clone)]
pub struct IluFactors {
    l: SparseMatrix,
    u: SparseMatrix,
    droptol: f64,
}

impl IluFactors {
    pub fn l(&self) -> &SparseMatrix {
        &self.l
    }

    pub fn u(&self) -> &SparseMatrix {
        &self.u
    }

    pub fn droptol(&self) -> f64 {
        self.droptol
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// `U⁻¹L⁻¹v`.
    pub fn solve(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(v.len(), n, "ILU solve dimension mismatch");
        let mut x = v.to_vec();
        for i in 0..n {
            let (cols, vals) = self.l.row(i);
            let mut s = x[i];
            for (&j, &lij) in cols.iter().zip(vals) {
                if j < i {
                    s -= lij * x[j];
                }
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let (cols, vals) = self.u.row(i);
            let mut s = x[i];
            let mut diag = C64::new(1.0, 0.0);
            for (&j, &uij) in cols.iter().zip(vals) {
                if j > i {
                    s -= uij * x[j];
                } else if j == i {
                    diag = uij;
                }
            }
            x[i] = s / diag;
        }
        x
    }
}

impl Preconditioner for IluFactors {
    fn apply_inverse(&self, v: &[C64]) -> Vec<C64> {
        self.solve(v)
    }
}

/// Row-wise ILUT: off-diagonal entries below `droptol·‖a_i‖₂` are dropped,
/// diagonal pivots are always kept, fill is unlimited otherwise.
pub fn ilu_factor(a: &SparseMatrix, droptol: f64) -> Result<IluFactors> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension(format!(
            "ILU needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if !(droptol >= 0.0) {
        return Err(Error::InvalidArgument(format!("drop tolerance {droptol} must be >= 0")));
    }
    let zero = C64::new(0.0, 0.0);
    let mut w = vec![zero; n];
    let mut occupied = vec![false; n];
    // U rows kept as (col, value) lists with the diagonal first
    let mut u_rows: Vec<Vec<(usize, C64)>> = Vec::with_capacity(n);
    let mut l_trip = Vec::new();
    let mut u_trip = Vec::new();

    for i in 0..n {
        let (cols, vals) = a.row(i);
        if !cols.contains(&i) {
            return Err(Error::PivotBreakdown(i));
        }
        let row_norm = vals.iter().fold(0.0, |acc, v| acc + v.norm_sqr()).sqrt();
        let tau = droptol * row_norm;
        let mut lower: BTreeSet<usize> = BTreeSet::new();
        let mut touched: Vec<usize> = Vec::with_capacity(cols.len());
        for (&j, &v) in cols.iter().zip(vals) {
            w[j] = v;
            occupied[j] = true;
            touched.push(j);
            if j < i {
                lower.insert(j);
            }
        }
        let mut l_row = Vec::new();
        while let Some(k) = lower.pop_first() {
            let ukk = u_rows[k][0].1;
            let mult = w[k] / ukk;
            w[k] = zero;
            if mult.norm() < tau {
                continue;
            }
            l_row.push((k, mult));
            for &(j, ukj) in &u_rows[k][1..] {
                if !occupied[j] {
                    occupied[j] = true;
                    touched.push(j);
                    if j < i {
                        lower.insert(j);
                    }
                }
                w[j] -= mult * ukj;
            }
        }
        let pivot = w[i];
        if pivot.norm() < PIVOT_TOL * row_norm || pivot.norm() == 0.0 {
            return Err(Error::PivotBreakdown(i));
        }
        let mut u_row = vec![(i, pivot)];
        touched.sort_unstable();
        for &j in &touched {
            if j > i && w[j].norm() >= tau && w[j].norm() > 0.0 {
                u_row.push((j, w[j]));
            }
            w[j] = zero;
            occupied[j] = false;
        }
        for &(k, v) in &l_row {
            l_trip.push((i, k, v));
        }
        l_trip.push((i, i, C64::new(1.0, 0.0)));
        for &(j, v) in &u_row {
            u_trip.push((i, j, v));
        }
        u_rows.push(u_row);
    }
    Ok(IluFactors {
        l: SparseMatrix::from_triplets(n, n, l_trip)?,
        u: SparseMatrix::from_triplets(n, n, u_trip)?,
        droptol,
    })
}
