#![allow(dead_code)]

use invit_core::linalg::{DenseMatrix, SparseMatrix};
use invit_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn cv(xs: &[f64]) -> Vec<C64> {
    xs.iter().map(|&x| c(x)).collect()
}

pub fn diag(xs: &[f64]) -> SparseMatrix {
    SparseMatrix::from_diagonal(&cv(xs))
}

pub fn dense(rows: &[&[f64]]) -> DenseMatrix {
    DenseMatrix::from_fn(rows.len(), rows[0].len(), |i, j| c(rows[i][j]))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, complex: bool) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
            C64::new(rng.random_range(-1.0..1.0), im)
        })
        .collect()
}

pub fn random_dense(rng: &mut ChaCha8Rng, n: usize, m: usize, complex: bool) -> DenseMatrix {
    let data = random_vec(rng, n * m, complex);
    DenseMatrix::from_col_major(n, m, data).unwrap()
}

/// `2I + 0.6/√n·R`: symmetric (kind 0), real nonsymmetric (1) or complex (2).
pub fn random_problem(seed: u64, n: usize, kind: u8) -> SparseMatrix {
    let mut r = rng(seed);
    let m = random_dense(&mut r, n, n, kind == 2);
    let s = 0.6 / (n as f64).sqrt();
    let d = DenseMatrix::from_fn(n, n, |i, j| {
        let v = if kind == 0 { (m[(i, j)] + m[(j, i)]) * 0.5 } else { m[(i, j)] };
        v * s + if i == j { c(2.0) } else { c(0.0) }
    });
    SparseMatrix::from_dense(&d)
}

pub fn unit(v: Vec<C64>) -> Vec<C64> {
    let n = invit_core::linalg::vector::norm2(&v);
    v.into_iter().map(|x| x / n).collect()
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `‖A − B‖_F`
pub fn dense_minus(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.sub_matrix(b).frobenius_norm()
}

use invit_core::krylov::LinearOperator;
use invit_core::precond::Preconditioner;
use nalgebra::{DMatrix, DVector};

pub fn to_na(a: &DenseMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Dense `B·P⁻¹`, one column at a time.
pub fn dense_operator(op: &dyn LinearOperator, pc: &dyn Preconditioner) -> DenseMatrix {
    let n = op.dim();
    let cols: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![c(0.0); n];
            e[j] = c(1.0);
            op.apply_vec(&pc.apply_inverse(&e))
        })
        .collect();
    DenseMatrix::from_columns(n, &cols).unwrap()
}

/// Orthonormal basis of `span{R, BR, …, B^{k−1}R}` for `k = 1..=k_max`,
/// built from explicit powers with two Gram–Schmidt sweeps in nalgebra.
fn krylov_bases(b: &DMatrix<C64>, r: &DMatrix<C64>, k_max: usize) -> Vec<DMatrix<C64>> {
    let n = b.nrows();
    let mut out = Vec::new();
    let mut q = DMatrix::<C64>::zeros(n, 0);
    let mut block = r.clone();
    for _ in 0..k_max {
        let mut next = Vec::new();
        for col in block.column_iter() {
            let mut v: DVector<C64> = col.into_owned();
            let scale = v.norm();
            for _ in 0..2 {
                if q.ncols() > 0 {
                    let h = q.adjoint() * &v;
                    v -= &q * h;
                }
            }
            if v.norm() > 1e-12 * scale.max(1e-300) {
                let v = &v / C64::new(v.norm(), 0.0);
                let at = q.ncols();
                q = q.insert_column(at, c(0.0));
                q.set_column(at, &v);
                next.push(v);
            }
        }
        out.push(q.clone());
        if next.is_empty() {
            break;
        }
        let nb = DMatrix::from_columns(&next);
        block = b * nb;
    }
    out
}

/// Per-column `min ‖r_l − B·x‖` with `x` in the block Krylov space of `R`,
/// for `k = 0..=k_max`, by SVD projection onto `range(B·Q_k)`.
pub fn krylov_column_residuals(b: &DenseMatrix, r: &DenseMatrix, k_max: usize) -> Vec<Vec<f64>> {
    let bn = to_na(b);
    let rn = to_na(r);
    let col_norms = |m: &DMatrix<C64>| m.column_iter().map(|c| c.norm()).collect::<Vec<f64>>();
    let mut res = vec![col_norms(&rn)];
    for q in krylov_bases(&bn, &rn, k_max) {
        let bq = &bn * &q;
        let svd = bq.svd(true, false);
        let s_max = svd.singular_values.max();
        let u = svd.u.unwrap();
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > 1e-14 * s_max)
            .collect();
        let uk = u.select_columns(&keep);
        let proj = &rn - &uk * (uk.adjoint() * &rn);
        res.push(col_norms(&proj));
    }
    while res.len() < k_max + 1 {
        res.push(res.last().unwrap().clone());
    }
    res
}

/// `min ‖R − B·X‖_F` over the block Krylov space, for `k = 0..=k_max`.
pub fn krylov_ls_oracle(b: &DenseMatrix, r: &DenseMatrix, k_max: usize) -> Vec<f64> {
    krylov_column_residuals(b, r, k_max)
        .into_iter()
        .map(|cols| cols.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect()
}
