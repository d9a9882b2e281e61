use crate::diagnostics::{block_bound_history, bound_history, compute_block_weights, compute_weights, BoundHistory};
use crate::krylov::{block_gmres, GmresOptions, LinearOperator};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::eigbasis::EigenBasis;
use crate::linalg::hessenberg::dense_eigenvalues;
use crate::linalg::vector::{axpy, dot, norm2, normalize_phase};
use crate::{Error, Result, C64};

use super::{inner_tolerance, FixedPrecond, InnerTrace, OuterRecord, OuterTrace, ProblemSpec};

/// A column whose norm drops below this fraction during orthogonalization
/// is considered dependent.
const RANK_TOL: f64 = 1e-12;

/// Modified Gram–Schmidt (two passes) with each column's largest component
/// made real and positive.
pub fn orthonormalize(y: &DenseMatrix) -> Result<DenseMatrix> {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(y.ncols());
    for j in 0..y.ncols() {
        let mut w = y.col(j).to_vec();
        let before = norm2(&w);
        for _ in 0..2 {
            for q in &cols {
                let h = dot(q, &w);
                axpy(-h, q, &mut w);
            }
        }
        if before == 0.0 || norm2(&w) <= RANK_TOL * before {
            return Err(Error::RankCollapse(j));
        }
        normalize_phase(&mut w);
        cols.push(w);
    }
    DenseMatrix::from_columns(y.nrows(), &cols)
}

/// Ritz values (nearest to `sigma` first) and `‖AY − Y·YᴴAY‖_F`.
fn rayleigh_ritz(spec: &ProblemSpec, y: &DenseMatrix) -> Result<(Vec<C64>, f64)> {
    let ay: Vec<Vec<C64>> = y.columns().iter().map(|c| spec.a.apply_vec(c)).collect();
    let u = y.ncols();
    let h = DenseMatrix::from_fn(u, u, |i, j| dot(y.col(i), &ay[j]));
    let mut ritz = dense_eigenvalues(&h)?;
    ritz.sort_by(|a, b| (a - spec.sigma).norm().partial_cmp(&(b - spec.sigma).norm()).unwrap());
    let mut res = 0.0;
    for (j, col) in ay.iter().enumerate() {
        let mut r = col.clone();
        for i in 0..u {
            axpy(-h[(i, j)], y.col(i), &mut r);
        }
        res += r.iter().fold(0.0, |acc, v| acc + v.norm_sqr());
    }
    Ok((ritz, res.sqrt()))
}

/// Inexact inverse subspace iteration with block GMRES inner solves.
/// Standard problems only.
pub fn subspace_iteration(
    spec: &ProblemSpec,
    u: usize,
    y0: &DenseMatrix,
    diag: Option<&EigenBasis>,
) -> Result<OuterTrace> {
    spec.validate()?;
    if spec.mass.is_some() {
        return Err(Error::InvalidArgument(
            "subspace iteration supports standard eigenproblems only (no mass matrix)".into(),
        ));
    }
    let n = spec.dim();
    if u == 0 || u > n || y0.ncols() != u || y0.nrows() != n {
        return Err(Error::Dimension(format!(
            "initial block is {}x{} but needs {n}x{u} with 1 <= u <= n",
            y0.nrows(),
            y0.ncols()
        )));
    }
    if let Some(b) = diag {
        if b.dim() != n {
            return Err(Error::Dimension(format!(
                "eigen-basis has dimension {} but A has {n}",
                b.dim()
            )));
        }
    }
    let op = spec.operator();
    let fixed = FixedPrecond::build(spec)?;
    let nodes = diag.map(|b| {
        let lambda = b.shifted_eigenvalues();
        match fixed.poly() {
            Some(p) => lambda.iter().map(|l| l * p.eval(*l)).collect::<Vec<_>>(),
            None => lambda,
        }
    });

    let mut y = orthonormalize(y0)?;
    let (mut ritz, mut rho) = rayleigh_ritz(spec, &y)?;
    let mut records = Vec::new();
    let mut converged = false;

    for i in 1..=spec.max_outer {
        let tau = inner_tolerance(spec.delta, rho);
        let cols = y.columns();
        let pc = fixed.for_step(spec, &op, &cols, ritz[0])?;
        let mut opts = GmresOptions::new(tau);
        opts.max_it = spec.inner_max_it;
        let trace = block_gmres(&op, &pc, &y, opts)?;

        let (mut weights, mut block_weights, mut bounds) = (None, None, None);
        if let Some(basis) = diag {
            let bw = compute_block_weights(basis, &y, None)?;
            if spec.precond.preserves_eigenvectors() {
                let nodes = nodes.as_ref().unwrap();
                bounds = Some(if u == 1 {
                    bound_history(basis.z_norm2(), bw.w.col(0), nodes, trace.iterations)?
                } else {
                    let b25 = block_bound_history(basis.z_norm2(), &bw.w, nodes, trace.iterations)?;
                    BoundHistory {
                        bound_26a: vec![f64::NAN; b25.len()],
                        bound_25: b25,
                    }
                });
            }
            if u == 1 {
                weights = Some(compute_weights(basis, &cols[0], None)?);
            }
            block_weights = Some(bw);
        }

        let next = orthonormalize(&trace.solution_block)?;
        records.push(OuterRecord {
            i,
            lambda: ritz[0],
            ritz: ritz.clone(),
            rho_norm: rho,
            tau,
            rhs: cols,
            inner: InnerTrace::Block(trace),
            weights,
            block_weights,
            bounds,
        });
        y = next;
        (ritz, rho) = rayleigh_ritz(spec, &y)?;
        if rho <= spec.outer_tol {
            converged = true;
            break;
        }
    }
    Ok(OuterTrace {
        records,
        converged,
        final_lambda: ritz[0],
        final_ritz: ritz,
        final_rho_norm: rho,
        final_x: y.columns(),
    })
}
