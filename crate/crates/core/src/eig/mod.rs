//! Outer eigenvalue iterations: inexact inverse iteration (standard and
//! generalized) and inverse subspace iteration.

mod inverse;
mod subspace;

pub use inverse::{inverse_iteration, rayleigh_quotient};
pub use subspace::{orthonormalize, subspace_iteration};

use crate::diagnostics::{BlockWeightRecord, BoundHistory, WeightRecord};
use crate::krylov::{BlockSolveTrace, LinearOperator, ShiftedOperator, SolveTrace};
use crate::linalg::sparse::SparseMatrix;
use crate::precond::{
    ilu_factor, tuned_make, Identity, IluFactors, PolyPrecond, PolyScheme, Preconditioner,
    TunedPrecond, TuningContext, TuningTarget,
};
use crate::{Error, Result, C64};

/// How the inner systems are preconditioned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrecondRegime {
    None,
    Ilu { droptol: f64 },
    /// Tuned update of ILU(`base_droptol`), or of the identity when `None`.
    Tuned {
        target: TuningTarget,
        base_droptol: Option<f64>,
    },
    Poly { degree: usize, scheme: PolyScheme },
}

impl PrecondRegime {
    /// Bounds are meaningful only when `B·P⁻¹` shares the eigenvectors of `B`.
    pub fn preserves_eigenvectors(&self) -> bool {
        matches!(self, PrecondRegime::None | PrecondRegime::Poly { .. })
    }
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub a: SparseMatrix,
    pub mass: Option<SparseMatrix>,
    pub sigma: C64,
    pub y0: Vec<C64>,
    pub delta: f64,
    pub max_outer: usize,
    /// Stop when `‖ρᵢ‖₂ ≤ outer_tol`.
    pub outer_tol: f64,
    pub precond: PrecondRegime,
    /// Inner GMRES step cap; defaults to `n`.
    pub inner_max_it: Option<usize>,
}

impl ProblemSpec {
    /// Defaults: `y₀ = (1/n)(1,…,1)`, `δ = 0.1`, 50 outer steps,
    /// `outer_tol = 1e-10`, no preconditioner.
    pub fn new(a: SparseMatrix, sigma: C64) -> Self {
        let n = a.nrows();
        Self {
            y0: vec![C64::new(1.0 / n as f64, 0.0); n],
            a,
            mass: None,
            sigma,
            delta: 0.1,
            max_outer: 50,
            outer_tol: 1e-10,
            precond: PrecondRegime::None,
            inner_max_it: None,
        }
    }

    pub fn with_mass(mut self, m: SparseMatrix) -> Self {
        self.mass = Some(m);
        self
    }

    pub fn with_precond(mut self, p: PrecondRegime) -> Self {
        self.precond = p;
        self
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn operator(&self) -> ShiftedOperator<'_> {
        ShiftedOperator::new(&self.a, self.mass.as_ref(), self.sigma)
    }

    /// `A − σM` as an explicit sparse matrix.
    pub fn shifted_matrix(&self) -> Result<SparseMatrix> {
        match &self.mass {
            Some(m) => self.a.add_scaled(m, -self.sigma),
            None => self.a.shifted(self.sigma),
        }
    }

    fn is_real(&self) -> bool {
        self.a.is_real() && self.mass.as_ref().is_none_or(|m| m.is_real()) && self.sigma.im == 0.0
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.a.ncols() != n {
            return Err(Error::Dimension("A must be square".into()));
        }
        if let Some(m) = &self.mass {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Dimension(format!(
                    "M is {}x{} but A is {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        if self.y0.len() != n {
            return Err(Error::Dimension(format!(
                "y0 has length {} but A has dimension {n}",
                self.y0.len()
            )));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidArgument(format!("delta = {} must be > 0", self.delta)));
        }
        Ok(())
    }
}

/// Inner solve record.
#[derive(Debug, Clone, PartialEq)]
pub enum InnerTrace {
    Single(SolveTrace),
    Block(BlockSolveTrace),
}

impl InnerTrace {
    pub fn residuals(&self) -> &[f64] {
        match self {
            InnerTrace::Single(t) => &t.residual_norms,
            InnerTrace::Block(t) => &t.residual_fro_norms,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            InnerTrace::Single(t) => t.iterations,
            InnerTrace::Block(t) => t.iterations,
        }
    }

    pub fn converged(&self) -> bool {
        match self {
            InnerTrace::Single(t) => t.converged,
            InnerTrace::Block(t) => t.converged,
        }
    }
}

/// Outer step `i`: the iterate `yᵢ = xᵢ₋₁`, its eigenvalue estimate and
/// residual, and the inner solve with `yᵢ` (or `Myᵢ`) as right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterRecord {
    pub i: usize,
    /// Estimate nearest the shift (Rayleigh quotient for single vectors).
    pub lambda: C64,
    /// All Ritz values of the block, nearest to the shift first.
    pub ritz: Vec<C64>,
    /// `‖ρᵢ₋₁‖₂` (Frobenius norm of the Ritz residual for blocks).
    pub rho_norm: f64,
    pub tau: f64,
    /// Columns of `yᵢ`.
    pub rhs: Vec<Vec<C64>>,
    pub inner: InnerTrace,
    pub weights: Option<WeightRecord>,
    pub block_weights: Option<BlockWeightRecord>,
    pub bounds: Option<BoundHistory>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OuterTrace {
    pub records: Vec<OuterRecord>,
    pub converged: bool,
    pub final_lambda: C64,
    pub final_ritz: Vec<C64>,
    pub final_rho_norm: f64,
    /// Final iterate columns.
    pub final_x: Vec<Vec<C64>>,
}

impl OuterTrace {
    pub fn outer_iterations(&self) -> usize {
        self.records.len()
    }

    pub fn inner_total(&self) -> usize {
        self.records.iter().map(|r| r.inner.iterations()).sum()
    }
}

/// `τ = min{δ, δ·‖ρ‖}`.
pub fn inner_tolerance(delta: f64, rho_norm: f64) -> f64 {
    delta.min(delta * rho_norm)
}

/// Preconditioner parts that stay fixed over the outer loop.
pub(crate) enum FixedPrecond {
    Identity,
    Ilu(IluFactors),
    Poly(PolyPrecond),
}

impl FixedPrecond {
    pub(crate) fn build(spec: &ProblemSpec) -> Result<Self> {
        Ok(match spec.precond {
            PrecondRegime::None
            | PrecondRegime::Tuned {
                base_droptol: None, ..
            } => FixedPrecond::Identity,
            PrecondRegime::Ilu { droptol }
            | PrecondRegime::Tuned {
                base_droptol: Some(droptol),
                ..
            } => FixedPrecond::Ilu(ilu_factor(&spec.shifted_matrix()?, droptol)?),
            PrecondRegime::Poly { degree, scheme } => {
                let op = spec.operator();
                FixedPrecond::Poly(PolyPrecond::from_ritz(&op, degree, scheme, spec.is_real())?)
            }
        })
    }

    pub(crate) fn poly(&self) -> Option<&PolyPrecond> {
        match self {
            FixedPrecond::Poly(p) => Some(p),
            _ => None,
        }
    }

    /// The preconditioner for one outer step.
    pub(crate) fn for_step<'a>(
        &'a self,
        spec: &'a ProblemSpec,
        op: &'a (dyn LinearOperator + 'a),
        y: &[Vec<C64>],
        gamma: C64,
    ) -> Result<Box<dyn Preconditioner + 'a>> {
        let base: &'a (dyn Preconditioner + 'a) = match self {
            FixedPrecond::Identity => &Identity,
            FixedPrecond::Ilu(f) => f,
            FixedPrecond::Poly(p) => return Ok(Box::new(p.bind(op))),
        };
        match spec.precond {
            PrecondRegime::Tuned { target, .. } => {
                let ctx = TuningContext {
                    a: &spec.a,
                    mass: spec.mass.as_ref(),
                    sigma: spec.sigma,
                    gamma,
                };
                let t: TunedPrecond<'a> = tuned_make(base, y, target, &ctx)?;
                Ok(Box::new(t))
            }
            _ => Ok(Box::new(base)),
        }
    }
}

/// `(A − λM)x` (or `(A − λI)x`).
pub(crate) fn eig_residual(a: &SparseMatrix, mass: Option<&SparseMatrix>, lambda: C64, x: &[C64]) -> Vec<C64> {
    let mut r = vec![C64::new(0.0, 0.0); x.len()];
    a.spmv_into(x, &mut r);
    match mass {
        Some(m) => {
            let mut mx = vec![C64::new(0.0, 0.0); x.len()];
            m.spmv_into(x, &mut mx);
            for (ri, v) in r.iter_mut().zip(&mx) {
                *ri -= lambda * v;
            }
        }
        None => {
            for (ri, v) in r.iter_mut().zip(x) {
                *ri -= lambda * v;
            }
        }
    }
    r
}
