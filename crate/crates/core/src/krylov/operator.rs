use crate::linalg::dense::DenseMatrix;
use crate::linalg::sparse::SparseMatrix;
use crate::precond::Preconditioner;
use crate::C64;

/// A square linear map `y = B·x`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);

    fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply(x, &mut y);
        y
    }
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        assert_eq!(self.nrows(), self.ncols(), "operator must be square");
        self.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.ncols(), "spmv dimension mismatch");
        self.spmv_into(x, y);
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        assert_eq!(self.nrows(), self.ncols(), "operator must be square");
        self.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.copy_from_slice(&self.matvec(x));
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        (**self).apply(x, y)
    }
}

/// `B = A − σM` (or `A − σI` when `mass` is `None`) applied without forming it.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedOperator<'a> {
    pub a: &'a SparseMatrix,
    pub mass: Option<&'a SparseMatrix>,
    pub sigma: C64,
}

impl<'a> ShiftedOperator<'a> {
    pub fn new(a: &'a SparseMatrix, mass: Option<&'a SparseMatrix>, sigma: C64) -> Self {
        Self { a, mass, sigma }
    }
}

impl LinearOperator for ShiftedOperator<'_> {
    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.a.spmv_into(x, y);
        match self.mass {
            Some(m) => {
                let mut mx = vec![C64::new(0.0, 0.0); x.len()];
                m.spmv_into(x, &mut mx);
                for (yi, v) in y.iter_mut().zip(&mx) {
                    *yi -= self.sigma * v;
                }
            }
            None => {
                for (yi, v) in y.iter_mut().zip(x) {
                    *yi -= self.sigma * v;
                }
            }
        }
    }
}

/// `B·P⁻¹` as a single operator.
pub struct PreconditionedOperator<'a, O: ?Sized, P: ?Sized> {
    pub op: &'a O,
    pub pc: &'a P,
}

impl<O: LinearOperator + ?Sized, P: Preconditioner + ?Sized> LinearOperator
    for PreconditionedOperator<'_, O, P>
{
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let t = self.pc.apply_inverse(x);
        self.op.apply(&t, y);
    }
}
