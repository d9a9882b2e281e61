//! Full right-preconditioned GMRES and block GMRES.
//!
//! Both solvers share one engine: a block Arnoldi process that orthogonalizes
//! one vector at a time, so `u = 1` is ordinary GMRES and a block run with a
//! single column reproduces it bit for bit.

use crate::linalg::dense::DenseMatrix;
use crate::linalg::hessenberg::givens;
use crate::linalg::vector::{axpy, dot, norm2};
use crate::precond::Preconditioner;
use crate::{Error, Result, C64};

use super::LinearOperator;

/// A new Arnoldi direction is dropped when its norm after orthogonalization
/// is at most this multiple of its norm before.
pub const DEFLATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ToleranceMode {
    /// Stop when `‖r_k‖ ≤ tol`.
    #[default]
    Absolute,
    /// Stop when `‖r_k‖ ≤ tol·‖r₀‖`.
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    pub tol: f64,
    /// Defaults to the problem dimension.
    pub max_it: Option<usize>,
    pub mode: ToleranceMode,
}

impl GmresOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_it: None,
            mode: ToleranceMode::Absolute,
        }
    }

    pub fn max_it(mut self, max_it: usize) -> Self {
        self.max_it = Some(max_it);
        self
    }

    pub fn relative(mut self) -> Self {
        self.mode = ToleranceMode::Relative;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    /// `‖r₀‖, ‖r₁‖, …` from the Givens recurrence.
    pub residual_norms: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `x = P⁻¹x̃`.
    pub solution: Vec<C64>,
    /// Absolute tolerance that was applied.
    pub final_tol: f64,
    /// `‖rhs − B·x‖` recomputed at exit.
    pub true_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSolveTrace {
    /// `‖Y − B·X_k‖_F` from the Givens recurrence.
    pub residual_fro_norms: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub solution_block: DenseMatrix,
    pub final_tol: f64,
    /// `‖Y − B·X‖_F` recomputed at exit.
    pub true_residual_fro: f64,
    /// Number of Arnoldi directions dropped as numerically dependent.
    pub deflated: usize,
}

struct EngineOutput {
    residuals: Vec<f64>,
    iterations: usize,
    converged: bool,
    solutions: Vec<Vec<C64>>,
    final_tol: f64,
    true_residual: f64,
    deflated: usize,
}

/// Two passes of modified Gram–Schmidt against `basis`; returns the
/// accumulated coefficients.
fn orthogonalize(basis: &[Vec<C64>], w: &mut [C64]) -> Vec<C64> {
    let mut coeffs = vec![C64::new(0.0, 0.0); basis.len()];
    for _ in 0..2 {
        for (c, v) in coeffs.iter_mut().zip(basis) {
            let h = dot(v, w);
            axpy(-h, v, w);
            *c += h;
        }
    }
    coeffs
}

/// Try to extend the basis with `w`; returns the new coefficient (zero if
/// the direction was deflated).
fn append(basis: &mut Vec<Vec<C64>>, mut w: Vec<C64>, before: f64) -> Option<f64> {
    let beta = norm2(&w);
    if before > 0.0 && beta > DEFLATION_TOL * before {
        for x in w.iter_mut() {
            *x /= beta;
        }
        basis.push(w);
        Some(beta)
    } else {
        None
    }
}

fn fro(rows: &[Vec<C64>]) -> f64 {
    rows.iter()
        .flat_map(|r| r.iter())
        .fold(0.0, |acc, z| acc + z.norm_sqr())
        .sqrt()
}

fn engine<O, P>(op: &O, pc: &P, rhs: &[Vec<C64>], opts: GmresOptions) -> Result<EngineOutput>
where
    O: LinearOperator + ?Sized,
    P: Preconditioner + ?Sized,
{
    let n = op.dim();
    let u = rhs.len();
    if u == 0 {
        return Err(Error::InvalidArgument("block GMRES needs at least one column".into()));
    }
    for (l, y) in rhs.iter().enumerate() {
        if y.len() != n {
            return Err(Error::Dimension(format!(
                "right-hand side column {l} has length {} but the operator has dimension {n}",
                y.len()
            )));
        }
    }
    let max_it = opts.max_it.unwrap_or(n);

    // g holds the rotated coordinates of the right-hand sides: one row per
    // basis vector, one column per right-hand side.
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut g: Vec<Vec<C64>> = Vec::new();
    let mut deflated = 0;
    for (l, y) in rhs.iter().enumerate() {
        let mut w = y.clone();
        let before = norm2(&w);
        let coeffs = orthogonalize(&basis, &mut w);
        for (row, c) in g.iter_mut().zip(coeffs) {
            row[l] += c;
        }
        match append(&mut basis, w, before) {
            Some(beta) => {
                let mut row = vec![C64::new(0.0, 0.0); u];
                row[l] = C64::new(beta, 0.0);
                g.push(row);
            }
            None => deflated += 1,
        }
    }

    let r0 = fro(&g);
    let tol = match opts.mode {
        ToleranceMode::Absolute => opts.tol,
        ToleranceMode::Relative => opts.tol * r0,
    };
    let mut residuals = vec![r0];
    let mut converged = r0 <= tol || basis.is_empty();
    let mut iterations = 0;

    let mut r_cols: Vec<Vec<C64>> = Vec::new();
    let mut rotations: Vec<(usize, f64, C64)> = Vec::new();
    let (mut block_start, mut block_end) = (0, basis.len());

    while !converged && iterations < max_it {
        iterations += 1;
        for j in block_start..block_end {
            let mut w = op.apply_vec(&pc.apply_inverse(&basis[j]));
            let before = norm2(&w);
            let mut h = orthogonalize(&basis, &mut w);
            match append(&mut basis, w, before) {
                Some(beta) => {
                    h.push(C64::new(beta, 0.0));
                    g.push(vec![C64::new(0.0, 0.0); u]);
                }
                None => deflated += 1,
            }
            for &(r, c, s) in &rotations {
                if r + 1 < h.len() {
                    let (x, y) = (h[r], h[r + 1]);
                    h[r] = x * c + s * y;
                    h[r + 1] = -s.conj() * x + y * c;
                }
            }
            let col = r_cols.len();
            for r in (col + 1..h.len()).rev() {
                let (c, s) = givens(h[r - 1], h[r]);
                let (x, y) = (h[r - 1], h[r]);
                h[r - 1] = x * c + s * y;
                h[r] = C64::new(0.0, 0.0);
                for l in 0..u {
                    let (x, y) = (g[r - 1][l], g[r][l]);
                    g[r - 1][l] = x * c + s * y;
                    g[r][l] = -s.conj() * x + y * c;
                }
                rotations.push((r - 1, c, s));
            }
            r_cols.push(h);
        }
        block_start = block_end;
        block_end = basis.len();
        let res = fro(&g[r_cols.len().min(g.len())..]);
        residuals.push(res);
        if res <= tol || block_start == block_end {
            converged = true;
        }
    }

    // x̃ = V·R⁻¹·g, then x = P⁻¹x̃
    let k = r_cols.len();
    let mut solutions = Vec::with_capacity(u);
    for l in 0..u {
        let mut y: Vec<C64> = (0..k).map(|i| g[i][l]).collect();
        for j in (0..k).rev() {
            let d = r_cols[j][j];
            if d.norm() == 0.0 {
                return Err(Error::Breakdown(format!(
                    "GMRES least-squares factor is singular at column {j}"
                )));
            }
            y[j] /= d;
            let yj = y[j];
            for i in 0..j {
                y[i] -= r_cols[j][i] * yj;
            }
        }
        let mut xt = vec![C64::new(0.0, 0.0); n];
        for (v, c) in basis.iter().zip(&y) {
            axpy(*c, v, &mut xt);
        }
        solutions.push(if k == 0 { xt } else { pc.apply_inverse(&xt) });
    }

    let mut true_sq = 0.0;
    for (x, y) in solutions.iter().zip(rhs) {
        let bx = op.apply_vec(x);
        true_sq += y
            .iter()
            .zip(&bx)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>();
    }

    Ok(EngineOutput {
        residuals,
        iterations,
        converged,
        solutions,
        final_tol: tol,
        true_residual: true_sq.sqrt(),
        deflated,
    })
}

/// Full GMRES for `B·x = rhs` with right preconditioner `P` and zero initial
/// guess.
pub fn gmres<O, P>(op: &O, pc: &P, rhs: &[C64], opts: GmresOptions) -> Result<SolveTrace>
where
    O: LinearOperator + ?Sized,
    P: Preconditioner + ?Sized,
{
    let out = engine(op, pc, &[rhs.to_vec()], opts)?;
    Ok(SolveTrace {
        residual_norms: out.residuals,
        iterations: out.iterations,
        converged: out.converged,
        solution: out.solutions.into_iter().next().unwrap(),
        final_tol: out.final_tol,
        true_residual: out.true_residual,
    })
}

/// Block GMRES for `B·X = Y` minimizing `‖Y − B·X_k‖_F` over the block Krylov
/// space, with deflation of dependent directions.
pub fn block_gmres<O, P>(op: &O, pc: &P, rhs: &DenseMatrix, opts: GmresOptions) -> Result<BlockSolveTrace>
where
    O: LinearOperator + ?Sized,
    P: Preconditioner + ?Sized,
{
    if rhs.nrows() != op.dim() {
        return Err(Error::Dimension(format!(
            "right-hand side block has {} rows but the operator has dimension {}",
            rhs.nrows(),
            op.dim()
        )));
    }
    let out = engine(op, pc, &rhs.columns(), opts)?;
    Ok(BlockSolveTrace {
        residual_fro_norms: out.residuals,
        iterations: out.iterations,
        converged: out.converged,
        solution_block: DenseMatrix::from_columns(rhs.nrows(), &out.solutions)?,
        final_tol: out.final_tol,
        true_residual_fro: out.true_residual,
        deflated: out.deflated,
    })
}
