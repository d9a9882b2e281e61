//! Inexact inverse iteration and inverse subspace iteration with (block) GMRES
//! inner solves.
//!
//! The crate is organised in layers:
//!
//! - [`linalg`]: sparse and dense kernels, Matrix Market and eigen-basis I/O,
//!   analytic test-problem generators, and small least-squares solvers.
//! - [`krylov`]: full (non-restarted) right-preconditioned GMRES, block GMRES
//!   with deflation, and Arnoldi Ritz values.
//! - [`precond`]: identity, ILUT, tuned (Sherman–Morrison) and residual
//!   polynomial preconditioners.
//! - [`eig`]: the outer eigenvalue iterations.
//! - [`diagnostics`]: eigenvector-weighted GMRES bounds that can be compared
//!   against measured residual histories.
//! - [`cli`]: the `invit` command-line harness writing CSV tables.

pub mod cli;
pub mod diagnostics;
pub mod eig;
mod error;
pub mod krylov;
pub mod linalg;
pub mod precond;

pub use error::{Error, Result};

/// Scalar type used throughout the crate.
pub type C64 = num_complex::Complex64;

pub use linalg::{DenseMatrix, EigenBasis, SparseMatrix};
