use crate::diagnostics::{bound_history, compute_weights};
use crate::krylov::{gmres, GmresOptions, LinearOperator};
use crate::linalg::eigbasis::EigenBasis;
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::vector::{dot, norm2, normalize_phase};
use crate::{Error, Result, C64};

use super::{eig_residual, inner_tolerance, FixedPrecond, InnerTrace, OuterRecord, OuterTrace, ProblemSpec};

/// `xᴴAx/xᴴx`, or `(Mx)ᴴAx/‖Mx‖²` for a generalized problem.
pub fn rayleigh_quotient(a: &SparseMatrix, mass: Option<&SparseMatrix>, x: &[C64]) -> Result<C64> {
    let ax = a.apply_vec(x);
    match mass {
        Some(m) => {
            let mx = m.apply_vec(x);
            let d = norm2(&mx);
            if d == 0.0 {
                return Err(Error::InvalidArgument("Rayleigh quotient with Mx = 0".into()));
            }
            Ok(dot(&mx, &ax) / (d * d))
        }
        None => {
            let d = norm2(x);
            if d == 0.0 {
                return Err(Error::InvalidArgument("Rayleigh quotient of a zero vector".into()));
            }
            Ok(dot(x, &ax) / (d * d))
        }
    }
}

/// Unit norm (or `‖Mx‖ = 1`) with the largest component real and positive.
fn normalize(x: &mut [C64], mass: Option<&SparseMatrix>) -> Result<()> {
    if normalize_phase(x) == 0.0 {
        return Err(Error::Breakdown("inner solution is zero".into()));
    }
    if let Some(m) = mass {
        let s = norm2(&m.apply_vec(x));
        if s == 0.0 {
            return Err(Error::Breakdown("iterate lies in the null space of M".into()));
        }
        for v in x.iter_mut() {
            *v /= s;
        }
    }
    Ok(())
}

/// Inexact inverse iteration with GMRES inner solves to `τᵢ = min{δ, δ‖ρᵢ₋₁‖}`.
///
/// With `diag`, the weights of each right-hand side in the eigenvector basis
/// of `A − σM` are recorded, and for eigenvector-preserving regimes also the
/// bound histories over the measured inner steps.
pub fn inverse_iteration(spec: &ProblemSpec, diag: Option<&EigenBasis>) -> Result<OuterTrace> {
    spec.validate()?;
    let n = spec.dim();
    if let Some(b) = diag {
        if b.dim() != n {
            return Err(Error::Dimension(format!(
                "eigen-basis has dimension {} but A has {n}",
                b.dim()
            )));
        }
    }
    let mass = spec.mass.as_ref();
    let op = spec.operator();
    let fixed = FixedPrecond::build(spec)?;
    let nodes = diag.map(|b| {
        let lambda = b.shifted_eigenvalues();
        match fixed.poly() {
            Some(p) => lambda.iter().map(|l| l * p.eval(*l)).collect::<Vec<_>>(),
            None => lambda,
        }
    });

    let mut x = spec.y0.clone();
    normalize(&mut x, mass).map_err(|_| Error::InvalidArgument("y0 is zero".into()))?;
    let mut lambda = rayleigh_quotient(&spec.a, mass, &x)?;
    let mut rho = norm2(&eig_residual(&spec.a, mass, lambda, &x));
    let mut records = Vec::new();
    let mut converged = false;

    for i in 1..=spec.max_outer {
        let tau = inner_tolerance(spec.delta, rho);
        let y = x.clone();
        let rhs = match mass {
            Some(m) => m.apply_vec(&y),
            None => y.clone(),
        };
        let pc = fixed.for_step(spec, &op, std::slice::from_ref(&y), lambda)?;
        let mut opts = GmresOptions::new(tau);
        opts.max_it = spec.inner_max_it;
        let trace = gmres(&op, &pc, &rhs, opts)?;

        let (weights, bounds) = match diag {
            Some(basis) => {
                let w = compute_weights(basis, &y, mass)?;
                let bounds = match (&nodes, spec.precond.preserves_eigenvectors()) {
                    (Some(nodes), true) => {
                        Some(bound_history(basis.z_norm2(), w.driving(), nodes, trace.iterations)?)
                    }
                    _ => None,
                };
                (Some(w), bounds)
            }
            None => (None, None),
        };

        x = trace.solution.clone();
        normalize(&mut x, mass)?;
        records.push(OuterRecord {
            i,
            lambda,
            ritz: vec![lambda],
            rho_norm: rho,
            tau,
            rhs: vec![y],
            inner: InnerTrace::Single(trace),
            weights,
            block_weights: None,
            bounds,
        });
        lambda = rayleigh_quotient(&spec.a, mass, &x)?;
        rho = norm2(&eig_residual(&spec.a, mass, lambda, &x));
        if rho <= spec.outer_tol {
            converged = true;
            break;
        }
    }
    Ok(OuterTrace {
        records,
        converged,
        final_lambda: lambda,
        final_ritz: vec![lambda],
        final_rho_norm: rho,
        final_x: vec![x],
    })
}
