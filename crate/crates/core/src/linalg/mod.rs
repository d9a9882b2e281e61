//! Sparse and dense kernels underpinning the solvers and diagnostics.

pub mod dense;
pub mod eigbasis;
pub mod generators;
pub mod hessenberg;
pub mod lsq;
pub mod mm;
pub mod norms;
pub mod sparse;
pub mod vector;

pub use dense::{dense_lu_solve, DenseMatrix, LuFactors};
pub use eigbasis::EigenBasis;
pub use generators::{gen_convdiff, gen_tridiag, Stencil};
pub use hessenberg::{dense_eigenvalues, hessenberg_eigenvalues};
pub use lsq::{constrained_poly_ls, LeastSquaresResult};
pub use mm::{mm_read, mm_read_str, mm_write, mm_write_string};
pub use norms::{spectral_norm2, NormEstimate};
pub use sparse::{spmv, SparseMatrix};
