//! Krylov subspace solvers: full GMRES, block GMRES and Arnoldi Ritz values.

mod arnoldi;
mod gmres;
mod operator;

pub use arnoldi::{arnoldi, arnoldi_ritz, ArnoldiFactorization};
pub use gmres::{
    block_gmres, gmres, BlockSolveTrace, GmresOptions, SolveTrace, ToleranceMode,
    DEFLATION_TOL,
};
pub use operator::{LinearOperator, PreconditionedOperator, ShiftedOperator};
