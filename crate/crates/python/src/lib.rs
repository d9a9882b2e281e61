//! Python bindings: `import invit`.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use invit_core::eig::{self, PrecondRegime, ProblemSpec};
use invit_core::krylov::{self, GmresOptions};
use invit_core::linalg::{self, Stencil};
use invit_core::precond::{self, PolyScheme, TuningTarget};

create_exception!(invit, InvitError, PyException);

fn err(e: invit_core::Error) -> PyErr {
    InvitError::new_err(e.to_string())
}

/// Sparse complex matrix in CSR form.
#[pyclass(name = "SparseMatrix", module = "invit", from_py_object)]
#[derive(Clone)]
struct PySparse {
    inner: linalg::SparseMatrix,
}

#[pymethods]
impl PySparse {
    #[staticmethod]
    fn from_triplets(
        nrows: usize,
        ncols: usize,
        rows: Vec<usize>,
        cols: Vec<usize>,
        values: Vec<Complex64>,
    ) -> PyResult<Self> {
        if rows.len() != cols.len() || rows.len() != values.len() {
            return Err(PyValueError::new_err("rows, cols and values must have equal length"));
        }
        let t: Vec<_> = rows.into_iter().zip(cols).zip(values).map(|((i, j), v)| (i, j, v)).collect();
        linalg::SparseMatrix::from_triplets(nrows, ncols, t)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn from_dense(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(PyValueError::new_err("ragged rows"));
        }
        let d = linalg::DenseMatrix::from_fn(n, m, |i, j| rows[i][j]);
        Ok(Self { inner: linalg::SparseMatrix::from_dense(&d) })
    }

    /// Read a Matrix Market coordinate file.
    #[staticmethod]
    fn read_mm(path: &str) -> PyResult<Self> {
        linalg::mm_read(path).map(|inner| Self { inner }).map_err(err)
    }

    fn write_mm(&self, path: &str) -> PyResult<()> {
        linalg::mm_write(path, &self.inner).map_err(err)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.nrows(), self.inner.ncols())
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn matvec(&self, x: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        linalg::spmv(&self.inner, &x).map_err(err)
    }

    fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let d = self.inner.to_dense();
        (0..d.nrows()).map(|i| (0..d.ncols()).map(|j| d[(i, j)]).collect()).collect()
    }

    fn __repr__(&self) -> String {
        format!("SparseMatrix({}x{}, nnz={})", self.inner.nrows(), self.inner.ncols(), self.inner.nnz())
    }
}

/// Eigenvector basis `Z` with eigenvalues, ordered by distance to a shift.
#[pyclass(name = "EigenBasis", module = "invit", from_py_object)]
#[derive(Clone)]
struct PyEigenBasis {
    inner: linalg::EigenBasis,
}

#[pymethods]
impl PyEigenBasis {
    /// Validate `(eigenvalues, columns of Z)` against `a`.
    #[new]
    fn new(a: &PySparse, eigenvalues: Vec<Complex64>, columns: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let z = linalg::DenseMatrix::from_columns(a.inner.nrows(), &columns).map_err(err)?;
        linalg::EigenBasis::new(&a.inner, eigenvalues, z)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    fn with_shift(&self, sigma: Complex64) -> Self {
        Self { inner: self.inner.clone().with_shift(sigma) }
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<Complex64> {
        self.inner.eigenvalues().to_vec()
    }

    #[getter]
    fn shifted_eigenvalues(&self) -> Vec<Complex64> {
        self.inner.shifted_eigenvalues()
    }

    #[getter]
    fn z_norm(&self) -> f64 {
        self.inner.z_norm2()
    }

    /// Coordinates `Z⁻¹v`.
    fn weights(&self, v: Vec<Complex64>) -> Vec<Complex64> {
        self.inner.solve(&v)
    }
}

/// `(A, basis)` for the Kronecker-sum convection–diffusion problem.
/// Stencils are `(alpha, beta, gamma)` triples.
#[pyfunction]
fn gen_convdiff(m: usize, x: (f64, f64, f64), y: (f64, f64, f64)) -> PyResult<(PySparse, PyEigenBasis)> {
    let (a, b) = linalg::gen_convdiff(m, Stencil::new(x.0, x.1, x.2), Stencil::new(y.0, y.1, y.2))
        .map_err(err)?;
    Ok((PySparse { inner: a }, PyEigenBasis { inner: b }))
}

#[pyfunction]
fn gen_tridiag(n: usize, a: f64, b: f64, c: f64) -> PyResult<PySparse> {
    linalg::gen_tridiag(n, a, b, c).map(|inner| PySparse { inner }).map_err(err)
}

#[pyclass(name = "SolveTrace", module = "invit", get_all)]
struct PySolveTrace {
    residual_norms: Vec<f64>,
    iterations: usize,
    converged: bool,
    solution: Vec<Complex64>,
    true_residual: f64,
}

/// Full GMRES on `a x = rhs`, optionally ILU-preconditioned.
#[pyfunction]
#[pyo3(signature = (a, rhs, tol, max_it=None, relative=false, ilu_droptol=None))]
fn gmres(
    a: &PySparse,
    rhs: Vec<Complex64>,
    tol: f64,
    max_it: Option<usize>,
    relative: bool,
    ilu_droptol: Option<f64>,
) -> PyResult<PySolveTrace> {
    let mut opts = GmresOptions::new(tol);
    if let Some(m) = max_it {
        opts = opts.max_it(m);
    }
    if relative {
        opts = opts.relative();
    }
    let t = match ilu_droptol {
        Some(th) => {
            let f = precond::ilu_factor(&a.inner, th).map_err(err)?;
            krylov::gmres(&a.inner, &f, &rhs, opts)
        }
        None => krylov::gmres(&a.inner, &precond::Identity, &rhs, opts),
    }
    .map_err(err)?;
    Ok(PySolveTrace {
        residual_norms: t.residual_norms,
        iterations: t.iterations,
        converged: t.converged,
        solution: t.solution,
        true_residual: t.true_residual,
    })
}

/// One outer step of an eigen-iteration.
#[pyclass(name = "OuterRecord", module = "invit", get_all)]
struct PyOuterRecord {
    i: usize,
    lambda_: Complex64,
    rho_norm: f64,
    tau: f64,
    inner_iterations: usize,
    inner_residuals: Vec<f64>,
    /// `(|w₁|, ‖w⁽²⁾‖)` when a basis was supplied.
    weight_split: Option<(f64, f64)>,
    bound_25: Option<Vec<f64>>,
    bound_26a: Option<Vec<f64>>,
}

#[pyclass(name = "OuterTrace", module = "invit", get_all)]
struct PyOuterTrace {
    records: Vec<Py<PyOuterRecord>>,
    converged: bool,
    final_lambda: Complex64,
    final_ritz: Vec<Complex64>,
    final_rho_norm: f64,
    final_x: Vec<Vec<Complex64>>,
    inner_total: usize,
}

fn regime(precond: &str, droptol: f64, degree: usize) -> PyResult<PrecondRegime> {
    let tuned = |target| PrecondRegime::Tuned { target, base_droptol: Some(droptol) };
    Ok(match precond {
        "none" => PrecondRegime::None,
        "ilu" => PrecondRegime::Ilu { droptol },
        "tuned-i" => tuned(TuningTarget::Identity),
        "tuned-a" => tuned(TuningTarget::A),
        "tuned-b" => tuned(TuningTarget::B),
        "tuned-l" => tuned(TuningTarget::Lambda),
        "poly" => PrecondRegime::Poly { degree, scheme: PolyScheme::Auto },
        "poly-cheb" => PrecondRegime::Poly { degree, scheme: PolyScheme::Cheb },
        "poly-contour" => PrecondRegime::Poly { degree, scheme: PolyScheme::Contour },
        other => return Err(PyValueError::new_err(format!("unknown preconditioner '{other}'"))),
    })
}

/// Inexact inverse iteration (`block == 1`) or inverse subspace iteration.
#[pyfunction]
#[pyo3(signature = (
    a, sigma, mass=None, basis=None, precond="none", droptol=1e-2, degree=10,
    delta=0.1, max_outer=50, outer_tol=1e-10, block=1, y0=None
))]
#[allow(clippy::too_many_arguments)]
fn inverse_iteration(
    py: Python<'_>,
    a: &PySparse,
    sigma: Complex64,
    mass: Option<&PySparse>,
    basis: Option<&PyEigenBasis>,
    precond: &str,
    droptol: f64,
    degree: usize,
    delta: f64,
    max_outer: usize,
    outer_tol: f64,
    block: usize,
    y0: Option<Vec<Vec<Complex64>>>,
) -> PyResult<PyOuterTrace> {
    let mut spec = ProblemSpec::new(a.inner.clone(), sigma);
    spec.mass = mass.map(|m| m.inner.clone());
    spec.precond = regime(precond, droptol, degree)?;
    spec.delta = delta;
    spec.max_outer = max_outer;
    spec.outer_tol = outer_tol;
    let diag = basis.map(|b| &b.inner);
    let n = spec.dim();
    let trace = if block == 1 && y0.as_ref().is_none_or(|c| c.len() == 1) {
        if let Some(c) = y0 {
            spec.y0 = c.into_iter().next().unwrap();
        }
        py.detach(|| eig::inverse_iteration(&spec, diag))
    } else {
        let cols = match y0 {
            Some(c) => c,
            None => {
                return Err(PyValueError::new_err("block runs need y0 as a list of columns"));
            }
        };
        let y = linalg::DenseMatrix::from_columns(n, &cols).map_err(err)?;
        py.detach(|| eig::subspace_iteration(&spec, cols.len(), &y, diag))
    }
    .map_err(err)?;

    let records = trace
        .records
        .iter()
        .map(|r| {
            let split = if r.rhs.len() > 1 {
                r.block_weights.as_ref().map(|b| (b.w1_norm, b.w2_norm))
            } else {
                r.weights.as_ref().map(|w| w.driving_split())
            };
            Py::new(
                py,
                PyOuterRecord {
                    i: r.i,
                    lambda_: r.lambda,
                    rho_norm: r.rho_norm,
                    tau: r.tau,
                    inner_iterations: r.inner.iterations(),
                    inner_residuals: r.inner.residuals().to_vec(),
                    weight_split: split,
                    bound_25: r.bounds.as_ref().map(|b| b.bound_25.clone()),
                    bound_26a: r.bounds.as_ref().map(|b| b.bound_26a.clone()),
                },
            )
        })
        .collect::<PyResult<Vec<_>>>()?;
    Ok(PyOuterTrace {
        records,
        converged: trace.converged,
        final_lambda: trace.final_lambda,
        final_ritz: trace.final_ritz.clone(),
        final_rho_norm: trace.final_rho_norm,
        inner_total: trace.inner_total(),
        final_x: trace.final_x,
    })
}

#[pyfunction]
#[pyo3(signature = (a, x, mass=None))]
fn rayleigh_quotient(a: &PySparse, x: Vec<Complex64>, mass: Option<&PySparse>) -> PyResult<Complex64> {
    eig::rayleigh_quotient(&a.inner, mass.map(|m| &m.inner), &x).map_err(err)
}

#[pymodule]
fn invit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("InvitError", m.py().get_type::<InvitError>())?;
    m.add_class::<PySparse>()?;
    m.add_class::<PyEigenBasis>()?;
    m.add_class::<PySolveTrace>()?;
    m.add_class::<PyOuterRecord>()?;
    m.add_class::<PyOuterTrace>()?;
    m.add_function(wrap_pyfunction!(gen_convdiff, m)?)?;
    m.add_function(wrap_pyfunction!(gen_tridiag, m)?)?;
    m.add_function(wrap_pyfunction!(gmres, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_iteration, m)?)?;
    m.add_function(wrap_pyfunction!(rayleigh_quotient, m)?)?;
    Ok(())
}
